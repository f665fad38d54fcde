#include "takt/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace takt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Slot {
    int station;
    int dir;
    int kind;  // 0 dep, 1 arr
};

}  // namespace

std::vector<double> pricing_penalties(const NetworkInstance&, const LineGraph& g,
                                      const DualSnapshot& duals, int line) {
    const int T = g.T;
    const int half = g.mult == 2 ? T / 2 : 0;
    const int other = g.travel_dir == kOutbound ? kInbound : kOutbound;
    std::vector<double> pen(g.slots(), 0.0);

    for (const ActiveRowDual& rd : duals.rows) {
        double w = -rd.y;  // packing rows carry y <= 0
        if (w == 0.0) continue;
        for (const WindowTerm& t : rd.row->terms) {
            if (t.line >= 0 && t.line != line) continue;
            for (int j = 0; j < g.layers; ++j) {
                if (t.segment >= 0 && t.segment != g.seg[j]) continue;
                int tail = g.joint_station[j];
                int head = g.joint_station[j + 1];
                Slot slots[4] = {{tail, g.travel_dir, 0},
                                 {head, g.travel_dir, 1},
                                 {head, other, 0},
                                 {tail, other, 1}};
                int nslots = g.rush ? 2 : 4;
                for (int si = 0; si < nslots; ++si) {
                    const Slot& sl = slots[si];
                    if (t.station >= 0 && t.station != sl.station) continue;
                    if (t.dir >= 0 && t.dir != sl.dir) continue;
                    if (t.kind >= 0 && t.kind != sl.kind) continue;
                    int c_lo = t.parallel >= 0 ? t.parallel : 0;
                    int c_hi = t.parallel >= 0 ? t.parallel + 1 : g.par_tracks[j];
                    if (c_lo >= g.par_tracks[j]) continue;
                    int span = std::min(t.wlen, T);
                    for (int dd = 0; dd < g.mult; ++dd) {
                        if (t.dup >= 0 && t.dup != dd) continue;
                        int off = dd * half;
                        // The event is affine in the node's dep time with
                        // slope +-1, so instead of scanning every t we walk
                        // the wlen instants the window covers and solve for t.
                        for (int sx = 0; sx < g.S; ++sx) {
                            auto event_at = [&](int tt) {
                                int id0 = g.node_id(j, tt, sx, 0);
                                switch (si) {
                                    case 0: return g.out_dep(id0);
                                    case 1: return g.out_arr(id0);
                                    case 2: return g.in_dep(id0);
                                    default: return g.in_arr(id0);
                                }
                            };
                            int ev0 = event_at(0);
                            int sg = pmod(event_at(1) - ev0, T) == 1 ? 1 : -1;
                            for (int dt = 0; dt < span; ++dt) {
                                int target = pmod(t.w0 + dt - off, T);
                                int tt = pmod(sg * (target - ev0), T);
                                int id0 = g.node_id(j, tt, sx, 0);
                                for (int c = c_lo; c < c_hi; ++c)
                                    pen[id0 + c] += w;
                            }
                        }
                    }
                }
            }
        }
    }

    for (const CutDual& cd : duals.cuts) {
        if (cd.y == 0.0) continue;
        for (const auto& [key, pi] : cd.cut->arc_pi) {
            RideArcRef a = decode_ride_arc(key);
            if (a.line != line) continue;
            double add = cd.y * pi;  // y >= 0, pi <= 0
            if (a.dir == g.travel_dir) {
                int j = a.hop;
                if (j < 0 || j >= g.layers) continue;
                for (int dd = 0; dd < g.mult; ++dd) {
                    int tt = pmod(a.tau - dd * half, T);
                    for (int sx = 0; sx < g.S; ++sx)
                        for (int c = 0; c < g.par_tracks[j]; ++c)
                            pen[g.node_id(j, tt, sx, c)] += add;
                }
            } else if (!g.rush) {
                int j = g.layers - 1 - a.hop;
                if (j < 0 || j >= g.layers) continue;
                // in_dep = s - t - phi_in, so t is pinned per offset choice
                for (int dd = 0; dd < g.mult; ++dd)
                    for (int sx = 0; sx < g.S; ++sx) {
                        int s = sx - g.kappa;
                        int tt = pmod(s - g.phi_in[j] - a.tau + dd * half, T);
                        for (int c = 0; c < g.par_tracks[j]; ++c)
                            pen[g.node_id(j, tt, sx, c)] += add;
                    }
            }
        }
    }
    return pen;
}

namespace {

struct DpTables {
    std::vector<double> val;
    std::vector<int> parent;
    bool any_terminal = false;
};

DpTables run_dp(const LineGraph& g, const std::vector<double>& pen,
                const std::vector<int>& fixed, const LineAdjacency* adj) {
    DpTables dp;
    dp.val.assign(g.slots(), kInf);
    dp.parent.assign(g.slots(), -1);

    for (int id = 0; id < g.slots(); ++id) {
        if (g.node_layer(id) != 0 || !g.valid[id]) continue;
        if (!fixed.empty() && fixed[0] >= 0 && fixed[0] != id) continue;
        dp.val[id] = pen[id];
    }

    for (int j = 1; j < g.layers; ++j) {
        int lo = g.node_id(j, 0, 0, 0);
        int hi = g.node_id(j, g.T - 1, g.S - 1, g.P - 1) + 1;
        for (int id = lo; id < hi; ++id) {
            if (!g.valid[id]) continue;
            if (!fixed.empty() && fixed[j] >= 0 && fixed[j] != id) continue;
            double best = kInf;
            int best_pred = -1;
            if (adj) {
                for (int e = adj->start[id]; e < adj->start[id + 1]; ++e) {
                    int pred = adj->pred[e];
                    double v = dp.val[pred] + static_cast<double>(adj->cost[e]);
                    if (v < best - 1e-12 ||
                        (std::fabs(v - best) <= 1e-12 && pred < best_pred)) {
                        best = v;
                        best_pred = pred;
                    }
                }
            } else {
                for_each_pred(g, id, [&](int pred) {
                    if (dp.val[pred] == kInf) return;
                    double v =
                        dp.val[pred] + static_cast<double>(arc_dwell_cost(g, pred, id));
                    if (v < best - 1e-12 ||
                        (std::fabs(v - best) <= 1e-12 && pred < best_pred)) {
                        best = v;
                        best_pred = pred;
                    }
                });
            }
            if (best_pred < 0) continue;
            dp.val[id] = best + pen[id];
            dp.parent[id] = best_pred;
        }
    }

    int last_lo = g.node_id(g.layers - 1, 0, 0, 0);
    for (int id = last_lo; id < g.slots(); ++id)
        if (dp.val[id] < kInf) {
            dp.any_terminal = true;
            break;
        }
    return dp;
}

std::vector<int> backtrack(const DpTables& dp, const LineGraph& g, int end) {
    std::vector<int> path(g.layers);
    int cur = end;
    for (int j = g.layers - 1; j >= 0; --j) {
        path[j] = cur;
        cur = dp.parent[cur];
    }
    return path;
}

}  // namespace

LineAdjacency build_adjacency(const LineGraph& g) {
    LineAdjacency a;
    a.start.assign(g.slots() + 1, 0);
    for (int id = 0; id < g.slots(); ++id)
        if (g.valid[id]) for_each_pred(g, id, [&](int) { ++a.start[id + 1]; });
    for (int id = 0; id < g.slots(); ++id) a.start[id + 1] += a.start[id];
    a.pred.resize(a.start.back());
    a.cost.resize(a.start.back());
    std::vector<int> fill(a.start.begin(), a.start.end() - 1);
    for (int id = 0; id < g.slots(); ++id) {
        if (!g.valid[id]) continue;
        for_each_pred(g, id, [&](int pred) {
            int e = fill[id]++;
            a.pred[e] = pred;
            a.cost[e] = static_cast<int>(arc_dwell_cost(g, pred, id));
        });
    }
    return a;
}

std::vector<PricedPath> price_line(const NetworkInstance& inst, const LineGraph& g,
                                   const DualSnapshot& duals, int line,
                                   const std::vector<int>& fixed, int max_paths,
                                   const LineAdjacency* adj) {
    std::vector<double> pen = pricing_penalties(inst, g, duals, line);
    DpTables dp = run_dp(g, pen, fixed, adj);
    if (!dp.any_terminal) return {};

    std::vector<std::pair<double, int>> ends;
    int last_lo = g.node_id(g.layers - 1, 0, 0, 0);
    for (int id = last_lo; id < g.slots(); ++id)
        if (dp.val[id] < kInf) ends.push_back({dp.val[id], id});
    std::sort(ends.begin(), ends.end());

    double base = static_cast<double>(g.base_cost) - duals.cover[line];
    std::vector<PricedPath> out;
    for (auto& [v, id] : ends) {
        if (static_cast<int>(out.size()) >= max_paths) break;
        double rc = v + base;
        if (rc >= -1e-6) break;  // sorted: the rest are no better
        PricedPath pp;
        pp.path = backtrack(dp, g, id);
        pp.cost = path_cost(inst, g, pp.path);
        pp.reduced_cost = rc;
        out.push_back(std::move(pp));
    }
    return out;
}

PricedPath best_path(const NetworkInstance& inst, const LineGraph& g,
                     const DualSnapshot& duals, int line, const std::vector<int>& fixed,
                     const LineAdjacency* adj) {
    std::vector<double> pen = pricing_penalties(inst, g, duals, line);
    DpTables dp = run_dp(g, pen, fixed, adj);
    PricedPath pp;
    if (!dp.any_terminal) return pp;

    double best = kInf;
    int best_id = -1;
    int last_lo = g.node_id(g.layers - 1, 0, 0, 0);
    for (int id = last_lo; id < g.slots(); ++id)
        if (dp.val[id] < best) {
            best = dp.val[id];
            best_id = id;
        }
    pp.path = backtrack(dp, g, best_id);
    pp.cost = path_cost(inst, g, pp.path);
    double cover = duals.cover.empty() ? 0.0 : duals.cover[line];
    pp.reduced_cost = best + static_cast<double>(g.base_cost) - cover;
    return pp;
}

}  // namespace takt
