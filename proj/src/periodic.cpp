#include "takt/periodic.hpp"

// Header-only; this TU anchors the module in the build.
