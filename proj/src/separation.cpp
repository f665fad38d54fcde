#include "takt/separation.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace takt {

namespace {

constexpr double kXTol = 1e-9;
constexpr double kViol = 1e-6;

bool open_overlap(int a, int la, int b, int lb, int T) {
    if (la <= 0 || lb <= 0) return false;
    return cyc_delta(a, b, T) < la || cyc_delta(b, a, T) < lb;
}

struct LineDeps {
    int run = 0;
    int freq = 1;
    std::map<int, double> dep;  // time -> weight
};

// deps grouped by (segment, entry station, track)
using Groups = std::map<std::tuple<int, int, int>, std::map<int, LineDeps>>;

Groups collect(const Master& m) {
    Groups groups;
    const auto& graphs = m.graphs();
    for (size_t idx = 0; idx < m.num_columns(); ++idx) {
        double x = m.column_value(static_cast<int>(idx));
        const Column& col = m.column(static_cast<int>(idx));
        if (x <= kXTol || col.dummy) continue;
        const LineGraph& g = graphs[col.line];
        int half = g.mult == 2 ? g.T / 2 : 0;
        for (int j = 0; j < g.layers; ++j) {
            int node = col.path[j];
            int c = g.node_c(node);
            for (int dup = 0; dup < g.mult; ++dup) {
                int off = dup * half;
                auto& fwd = groups[{g.seg[j], g.joint_station[j], c}][col.line];
                fwd.run = g.phi_out[j];
                fwd.freq = g.mult;
                fwd.dep[pmod(g.out_dep(node) + off, g.T)] += x;
                if (!g.rush) {
                    auto& bwd = groups[{g.seg[j], g.joint_station[j + 1], c}][col.line];
                    bwd.run = g.phi_in[j];
                    bwd.freq = g.mult;
                    bwd.dep[pmod(g.in_dep(node) + off, g.T)] += x;
                }
            }
        }
    }
    return groups;
}

double window_mass(const std::map<int, double>& d, int w0, int wlen, int T) {
    double s = 0.0;
    for (auto [t, w] : d)
        if (cyc_delta(w0, t, T) < wlen) s += w;
    return s;
}

// Grow half-open windows from the violated anchor pair (v1, v2) out to the
// first compatible instant, then clamp and verify the all-pairs property.
bool build_windows(int v1, int v2, int T, int lim1, int lim2,
                   const std::function<bool(int, int)>& inc, int& w1, int& w2) {
    w1 = T;
    for (int step = 1; step < T; ++step)
        if (!inc(pmod(v1 + step, T), v2)) {
            w1 = step;
            break;
        }
    w2 = T;
    for (int step = 1; step < T; ++step)
        if (!inc(v1, pmod(v2 + step, T))) {
            w2 = step;
            break;
        }
    w1 = std::min(w1, lim1);
    w2 = std::min(w2, lim2);

    // The conflict region is staircase-shaped so this should hold as built;
    // shrink defensively if a compatible pair slips in.
    for (;;) {
        bool ok = true;
        for (int i = 0; i < w1 && ok; ++i)
            for (int jj = 0; jj < w2; ++jj)
                if (!inc(pmod(v1 + i, T), pmod(v2 + jj, T))) {
                    if (i == 0 && jj == 0) return false;
                    if (i >= jj)
                        w1 = std::max(1, i);
                    else
                        w2 = std::max(1, jj);
                    ok = false;
                    break;
                }
        if (ok) return true;
    }
}

struct PairSeparator {
    Master& m;
    int T;
    SeparationStats& stats;

    // Anchor line deps a, other line deps b; emits at most one row per v1.
    int run_pair(int line_a, const LineDeps& a, int line_b, const LineDeps& b,
                 const std::function<bool(int, int)>& inc, RowKind kind,
                 const WindowTerm& proto_a, const WindowTerm& proto_b) {
        int lim_a = a.freq == 2 ? T / 2 : T;
        int lim_b = b.freq == 2 ? T / 2 : T;
        int added = 0;
        for (auto [v1, wa] : a.dep) {
            (void)wa;
            // candidate anchors on the other side, nearest first
            std::vector<int> cand;
            for (auto [t2, wb] : b.dep) {
                (void)wb;
                if (inc(v1, t2)) cand.push_back(t2);
            }
            std::sort(cand.begin(), cand.end(), [&](int p, int q) {
                return cyc_delta(v1, p, T) < cyc_delta(v1, q, T);
            });
            for (int v2 : cand) {
                int w1 = 0, w2 = 0;
                if (!build_windows(v1, v2, T, lim_a, lim_b, inc, w1, w2)) continue;
                double lhs = window_mass(a.dep, v1, w1, T) + window_mass(b.dep, v2, w2, T);
                if (lhs <= 1.0 + kViol) continue;
                MasterRow row;
                row.kind = kind;
                row.rhs = 1.0;
                WindowTerm ta = proto_a, tb = proto_b;
                ta.line = line_a;
                ta.w0 = v1;
                ta.wlen = w1;
                tb.line = line_b;
                tb.w0 = v2;
                tb.wlen = w2;
                row.terms = {ta, tb};
                if (m.add_cut_row(std::move(row))) ++added;
                break;
            }
        }
        stats.overtake += kind == RowKind::overtake ? added : 0;
        stats.crossing += kind == RowKind::crossing ? added : 0;
        return added;
    }
};

void separate_symmetry(Master& m, const std::vector<std::pair<int, int>>& dir_pairs,
                       SeparationStats& stats) {
    const NetworkInstance& inst = m.instance();
    const int T = inst.params.period;
    const int kappa = inst.params.kappa;

    // weighted event times for one (line, station, segment, kind)
    auto gather = [&](int line, int station, int segment, int kind) {
        std::map<int, double> d;
        for (size_t idx = 0; idx < m.num_columns(); ++idx) {
            const Column& col = m.column(static_cast<int>(idx));
            double x = m.column_value(static_cast<int>(idx));
            if (x <= kXTol || col.dummy || col.line != line) continue;
            for (const TrackEvent& e : col.events) {
                int k = e.kind == EventKind::departure ? 0 : 1;
                if (e.station == station && e.segment == segment && k == kind)
                    d[e.time] += x;
            }
        }
        return d;
    };

    for (auto [lo, li] : dir_pairs) {
        const Line& line = inst.lines[lo];
        int n = line.num_stations();
        for (int family = 0; family < 2; ++family) {
            for (int pos = (family == 0 ? 0 : 1); pos < (family == 0 ? n - 1 : n); ++pos) {
                int st = line.stations[pos];
                int seg = line.segments[family == 0 ? pos : pos - 1];
                int dep_line = family == 0 ? lo : li;
                int arr_line = family == 0 ? li : lo;
                auto deps = gather(dep_line, st, seg, 0);
                auto arrs = gather(arr_line, st, seg, 1);
                if (deps.empty() || arrs.empty()) continue;
                for (auto [t, wd] : deps) {
                    (void)wd;
                    for (auto [t2, wa] : arrs) {
                        (void)wa;
                        int r = pmod(t + t2, T);
                        if (r <= kappa || r >= T - kappa) continue;
                        int slack_lo = r - (kappa + 1);
                        int slack_hi = (T - kappa - 1) - r;
                        int a = slack_lo / 2, c2 = slack_lo - a;
                        int b = slack_hi / 2, d2 = slack_hi - b;
                        int w0_1 = pmod(t - a, T), w1 = a + 1 + b;
                        int w0_2 = pmod(t2 - c2, T), w2 = c2 + 1 + d2;
                        double lhs = window_mass(deps, w0_1, w1, T) +
                                     window_mass(arrs, w0_2, w2, T);
                        if (lhs <= 1.0 + kViol) continue;
                        MasterRow row;
                        row.kind = RowKind::symmetry;
                        row.rhs = 1.0;
                        WindowTerm td, ta;
                        td.line = dep_line;
                        td.station = st;
                        td.segment = seg;
                        td.kind = 0;
                        td.w0 = w0_1;
                        td.wlen = w1;
                        ta.line = arr_line;
                        ta.station = st;
                        ta.segment = seg;
                        ta.kind = 1;
                        ta.w0 = w0_2;
                        ta.wlen = w2;
                        row.terms = {td, ta};
                        if (m.add_cut_row(std::move(row))) ++stats.symmetry;
                        break;
                    }
                }
            }
        }
    }
}

}  // namespace

SeparationStats separate(Master& m, const std::vector<std::pair<int, int>>& dir_pairs) {
    SeparationStats stats;
    const NetworkInstance& inst = m.instance();
    const int T = inst.params.period;

    Groups groups = collect(m);
    PairSeparator sep{m, T, stats};

    // overtaking: same segment, same entry, same track, different lines
    for (auto& [key, by_line] : groups) {
        auto [seg, entry, par] = key;
        const TrackSegment& ts = inst.segments[seg];
        int exit = ts.station_a == entry ? ts.station_b : ts.station_a;
        int d = inst.dep_headway(seg, entry);
        int a = inst.arr_headway(seg, exit);
        for (auto& [la, da] : by_line)
            for (auto& [lb, db] : by_line) {
                if (la == lb) continue;
                int ra = da.run, rb = db.run;
                auto inc = [&, ra, rb, d, a](int t1, int t2) {
                    if (d > 0 && cyc_dist(t1, t2, T) < d) return true;
                    if (a > 0 && cyc_dist(pmod(t1 + ra, T), pmod(t2 + rb, T), T) < a)
                        return true;
                    int del = cyc_delta(t1, t2, T);
                    if (del > 0 && del + rb < ra) return true;
                    int del2 = cyc_delta(t2, t1, T);
                    if (del2 > 0 && del2 + ra < rb) return true;
                    return false;
                };
                WindowTerm proto;
                proto.station = entry;
                proto.segment = seg;
                proto.parallel = par;
                proto.kind = 0;
                WindowTerm proto_b = proto;
                sep.run_pair(la, da, lb, db, inc, RowKind::overtake, proto, proto_b);
            }
    }

    // crossings: single track, opposite entries, different lines
    for (size_t s = 0; s < inst.segments.size(); ++s) {
        if (inst.segments[s].kind != SegmentKind::single_track) continue;
        int X = inst.segments[s].station_a, Y = inst.segments[s].station_b;
        auto itx = groups.find({static_cast<int>(s), X, 0});
        auto ity = groups.find({static_cast<int>(s), Y, 0});
        if (itx == groups.end() || ity == groups.end()) continue;
        int fX = inst.opposite_gap(static_cast<int>(s), X);
        int fY = inst.opposite_gap(static_cast<int>(s), Y);
        for (auto& [la, da] : itx->second)
            for (auto& [lb, db] : ity->second) {
                if (la == lb) continue;
                int ra = da.run, rb = db.run;
                auto inc = [&, ra, rb, fX, fY](int t1, int t2) {
                    if (open_overlap(t1, ra, t2, rb, T)) return true;
                    if (fX > 0 && cyc_delta(pmod(t2 + rb, T), t1, T) < fX) return true;
                    if (fY > 0 && cyc_delta(pmod(t1 + ra, T), t2, T) < fY) return true;
                    return false;
                };
                WindowTerm pa, pb;
                pa.station = X;
                pa.segment = static_cast<int>(s);
                pa.parallel = 0;
                pa.kind = 0;
                pb = pa;
                pb.station = Y;
                sep.run_pair(la, da, lb, db, inc, RowKind::crossing, pa, pb);
            }
    }

    if (!dir_pairs.empty()) separate_symmetry(m, dir_pairs, stats);
    if (m.lazy_headways()) stats.pool_rows = m.activate_violated_pool_rows();
    return stats;
}

}  // namespace takt
