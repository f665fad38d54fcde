#pragma once

#include <stdexcept>

namespace takt {

// All times are integer instants on a cyclic horizon of `period` instants.
// With the default period of 120 one instant is half a minute.

inline int pmod(int x, int period) {
    int r = x % period;
    return r < 0 ? r + period : r;
}

// Directed cyclic distance: instants elapsed going forward from a to b.
// Always in [0, period).
inline int cyc_delta(int a, int b, int period) {
    return pmod(b - a, period);
}

// Undirected cyclic distance: min of both directions.
inline int cyc_dist(int a, int b, int period) {
    int d = cyc_delta(a, b, period);
    return d <= period - d ? d : period - d;
}

struct PeriodicTime {
    int t = 0;
    int period = 120;
};

class period_mismatch : public std::invalid_argument {
public:
    period_mismatch() : std::invalid_argument("periodic times have different periods") {}
};

// Time elapsed from u to w, wrapping forward past the end of the cycle
// when w's instant is smaller.
inline int delta(const PeriodicTime& u, const PeriodicTime& w) {
    if (u.period != w.period) throw period_mismatch();
    return cyc_delta(u.t, w.t, u.period);
}

// u precedes-or-coincides-with w: going forward from u reaches w no later
// than going forward from w reaches u. Antisymmetric up to coincidence,
// total over any pair.
inline bool precedes(const PeriodicTime& u, const PeriodicTime& w) {
    return delta(w, u) >= delta(u, w);
}

inline bool strictly_precedes(const PeriodicTime& u, const PeriodicTime& w) {
    return u.t != w.t && precedes(u, w);
}

}  // namespace takt
