#pragma once

#include <utility>
#include <vector>

#include "takt/master.hpp"

namespace takt {

// Lazy separation of packing rows the pools cannot express: overtaking on a
// shared track, crossings on single track, and (in the split-direction
// baseline) the pairing rows that tie a line's two directions together.
//
// Each emitted row is a clique over two event windows: every event in the
// first window is incompatible with every event in the second.  Windows are
// grown from a violated anchor pair to the last compatible event, verified
// pairwise, and clamped to half a period for frequency-2 lines so that a
// single schedule group never holds two events of one window.

struct SeparationStats {
    int overtake = 0;
    int crossing = 0;
    int pool_rows = 0;  // headway/platform/sibling rows found in lazy mode
    int symmetry = 0;
    int total() const { return overtake + crossing + pool_rows + symmetry; }
};

// dir_pairs: (outbound split-line, inbound split-line) per original line;
// empty outside the split-direction baseline.
SeparationStats separate(Master& m,
                         const std::vector<std::pair<int, int>>& dir_pairs = {});

}  // namespace takt
