#pragma once

#include <cstdint>
#include <string>

#include "takt/instance.hpp"

namespace takt {

// Deterministic instance generator: a hub with radial branches, lines running
// tip-to-tip through the hub.  Feature knobs add a quadruple-track chain next
// to the hub, a single-track branch with single-platform stations, an express
// overlay, a frequency-2 line, a rush-hour line and one sibling pair.  Equal
// specs give byte-identical instances.

struct SynthSpec {
    uint64_t seed = 1;
    int branches = 4;
    std::vector<int> branch_len;  // stations per branch; empty = derive
    int stations = 15;            // target total (hub included) when deriving
    int lines = 6;
    int period = 120;  // instants (one instant = half a minute)
    int kappa = 3;
    int headway = 6;          // network-wide dep/arr headway override
    int hub_headway = 6;      // override at the hub
    int sibling_spread = 30;  // min spread between sibling departures
    int min_transfer = 10;
    int max_extra_dwell = 6;
    bool with_quad = true;          // quadruple chain on branch 0 next to the hub
    bool with_single_track = true;  // last branch single track, single platforms
    bool with_express = true;       // line 2 re-runs line 0's route, skips stops
    bool with_freq2 = true;         // line 3 runs two train pairs per period
    bool with_rush = true;          // line 4 runs one direction only
    bool representative = false;    // restrict routing cuts to hub and tips
    int od_pairs = 40;
    double demand_lo = 0.5;
    double demand_hi = 30.0;
    double alpha = -1.0;
};

NetworkInstance synth_instance(const SynthSpec& spec);

// "tiny" | "small" | "medium"; throws on anything else.
SynthSpec synth_preset(const std::string& name);

}  // namespace takt
