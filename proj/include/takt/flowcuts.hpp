#pragma once

#include <cstdint>
#include <unordered_map>

namespace takt {

// A ride arc is one train movement passengers can sit on: a (line, direction,
// hop, departure instant) tuple.  Hops are counted along the direction's
// travel order.  The key packs the tuple so timetabling columns and the
// routing graph can talk about the same arc without sharing a graph object.
inline long long ride_arc_key(int line, int dir, int hop, int tau) {
    return (((static_cast<long long>(line) * 2 + dir) * 256 + hop) * 16384) + tau;
}

struct RideArcRef {
    int line;
    int dir;
    int hop;
    int tau;
};

inline RideArcRef decode_ride_arc(long long key) {
    RideArcRef r;
    r.tau = static_cast<int>(key % 16384);
    key /= 16384;
    r.hop = static_cast<int>(key % 256);
    key /= 256;
    r.dir = static_cast<int>(key % 2);
    r.line = static_cast<int>(key / 2);
    return r;
}

// Optimality cut from the passenger-routing subproblem, valid for every
// timetable:  z_k >= rhs + sum_a pi[a] * x_a  with pi <= 0, where x_a is 1
// when ride arc a is operated.  rhs collects the routing duals that do not
// depend on the timetable.
struct FlowCut {
    int commodity = -1;
    double rhs = 0.0;
    std::unordered_map<long long, double> arc_pi;
};

}  // namespace takt
