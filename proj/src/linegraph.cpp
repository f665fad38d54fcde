#include "takt/linegraph.hpp"

#include <functional>
#include <stdexcept>

namespace takt {

namespace {

bool open_overlap(int a, int la, int b, int lb, int T) {
    if (la <= 0 || lb <= 0) return false;
    return cyc_delta(a, b, T) < la || cyc_delta(b, a, T) < lb;
}

}  // namespace

LineGraph build_line_graph(const NetworkInstance& inst, int line_id) {
    const Line& line = inst.lines[line_id];
    const int T = inst.params.period;
    const int n = line.num_stations();
    const int m = line.num_segments();

    LineGraph g;
    g.line = line_id;
    g.T = T;
    g.rush = line.rush_hour;
    g.travel_dir = line.rush_hour ? line.rush_direction : kOutbound;
    g.kappa = line.rush_hour ? 0 : inst.params.kappa;
    g.S = line.rush_hour ? 1 : 2 * g.kappa + 1;
    g.mult = line.frequency;
    g.layers = m;

    auto pos_of_visit = [&](int v) { return line_position(line, g.travel_dir, v); };

    g.seg.resize(m);
    g.par_tracks.resize(m);
    g.phi_out.resize(m);
    g.phi_in.resize(m, 0);
    g.quad_chain_link.assign(m, 0);
    g.joint_station.resize(m + 1);
    g.dwell_lo_out.assign(m + 1, 0);
    g.dwell_hi_out.assign(m + 1, 0);
    g.dwell_lo_in.assign(m + 1, 0);
    g.dwell_hi_in.assign(m + 1, 0);
    g.joint_single_platform.assign(m + 1, 0);
    g.joint_platform_hw.assign(m + 1, 0);

    int other_dir = g.travel_dir == kOutbound ? kInbound : kOutbound;
    int pmax = 1;
    for (int j = 0; j < m; ++j) {
        int seg_pos = hop_segment_position(line, g.travel_dir, j);
        g.seg[j] = line.segments[seg_pos];
        g.par_tracks[j] = inst.segments[g.seg[j]].parallel_tracks_per_direction();
        pmax = std::max(pmax, g.par_tracks[j]);
        g.phi_out[j] = line.run[g.travel_dir][seg_pos];
        if (!g.rush) g.phi_in[j] = line.run[other_dir][seg_pos];
        if (j > 0) {
            int prev_seg = g.seg[j - 1];
            g.quad_chain_link[j] =
                inst.segments[g.seg[j]].kind == SegmentKind::quadruple_track &&
                inst.segments[prev_seg].kind == SegmentKind::quadruple_track;
        }
    }
    g.P = pmax;

    for (int j = 0; j <= m; ++j) {
        int pos = pos_of_visit(j);
        int st = line.stations[pos];
        g.joint_station[j] = st;
        g.joint_single_platform[j] = inst.stations[st].single_platform;
        g.joint_platform_hw[j] = inst.platform_headway(st);
        if (j == 0 || j == m) continue;
        if (line.stops[pos]) {
            g.dwell_lo_out[j] = line.min_dwell[g.travel_dir][pos - 1];
            g.dwell_hi_out[j] = g.dwell_lo_out[j] + inst.params.max_extra_dwell;
            if (!g.rush) {
                g.dwell_lo_in[j] = line.min_dwell[other_dir][pos - 1];
                g.dwell_hi_in[j] = g.dwell_lo_in[j] + inst.params.max_extra_dwell;
            }
        }
    }

    g.base_cost = 0;
    for (int j = 0; j < m; ++j) g.base_cost += g.mult * (g.phi_out[j] + g.phi_in[j]);

    const int half = g.mult == 2 ? T / 2 : 0;
    g.valid.assign(g.slots(), 0);
    for (int j = 0; j < m; ++j) {
        const auto& segment = inst.segments[g.seg[j]];
        int tail = g.joint_station[j];
        int head = g.joint_station[j + 1];
        bool single = segment.kind == SegmentKind::single_track;
        int d_tail = inst.dep_headway(g.seg[j], tail);
        int a_head = inst.arr_headway(g.seg[j], head);
        int d_head = inst.dep_headway(g.seg[j], head);
        int a_tail = inst.arr_headway(g.seg[j], tail);
        int f_tail = inst.opposite_gap(g.seg[j], tail);
        int f_head = inst.opposite_gap(g.seg[j], head);

        // Frequency-2 duplicate spacing is t-independent: reject the whole
        // layer when the half-period offset violates a headway.
        if (g.mult == 2) {
            if (half < d_tail || half < a_head) continue;
            if (!g.rush && (half < d_head || half < a_tail)) continue;
            if (g.joint_single_platform[j + 1] && half < g.joint_platform_hw[j + 1])
                continue;
            if (!g.rush && g.joint_single_platform[j] && half < g.joint_platform_hw[j])
                continue;
        }

        for (int t = 0; t < T; ++t) {
            for (int si = 0; si < g.S; ++si) {
                int s = si - g.kappa;
                if (!g.rush) {
                    // Arrival-side symmetry at the head station.
                    int head_off = s + g.phi_out[j] - g.phi_in[j];
                    if (head_off > g.kappa || head_off < -g.kappa) continue;
                }
                bool ok = true;
                if (!g.rush && single) {
                    int in_dep = pmod(s - t - g.phi_in[j], T);
                    for (int da = 0; ok && da <= (g.mult == 2 ? 1 : 0); ++da)
                        for (int db = 0; ok && db <= (g.mult == 2 ? 1 : 0); ++db) {
                            int od = pmod(t + da * half, T);
                            int idp = pmod(in_dep + db * half, T);
                            if (open_overlap(od, g.phi_out[j], idp, g.phi_in[j], T))
                                ok = false;
                            if (ok && f_tail > 0 &&
                                cyc_delta(pmod(idp + g.phi_in[j], T), od, T) < f_tail)
                                ok = false;
                            if (ok && f_head > 0 &&
                                cyc_delta(pmod(od + g.phi_out[j], T), idp, T) < f_head)
                                ok = false;
                        }
                }
                if (!ok) continue;
                for (int c = 0; c < g.par_tracks[j]; ++c)
                    g.valid[g.node_id(j, t, si, c)] = 1;
            }
        }
    }

    return g;
}

void append_node_events(const NetworkInstance& inst, const LineGraph& g, int node,
                        std::vector<TrackEvent>& out) {
    (void)inst;
    int j = g.node_layer(node);
    int c = g.node_c(node);
    int tail = g.joint_station[j];
    int head = g.joint_station[j + 1];
    int seg = g.seg[j];
    int half = g.mult == 2 ? g.T / 2 : 0;
    for (int dup = 0; dup < g.mult; ++dup) {
        int off = dup * half;
        out.push_back({tail, seg, c, EventKind::departure, pmod(g.out_dep(node) + off, g.T),
                       g.line, g.travel_dir, dup});
        out.push_back({head, seg, c, EventKind::arrival, pmod(g.out_arr(node) + off, g.T),
                       g.line, g.travel_dir, dup});
        if (!g.rush) {
            int other = g.travel_dir == kOutbound ? kInbound : kOutbound;
            out.push_back({head, seg, c, EventKind::departure,
                           pmod(g.in_dep(node) + off, g.T), g.line, other, dup});
            out.push_back({tail, seg, c, EventKind::arrival,
                           pmod(g.in_arr(node) + off, g.T), g.line, other, dup});
        }
    }
}

std::vector<TrainPath> decode_path(const NetworkInstance& inst, const LineGraph& g,
                                   const std::vector<int>& path) {
    const Line& line = inst.lines[g.line];
    const int T = g.T;
    const int m = g.layers;
    const int n = line.num_stations();
    if (static_cast<int>(path.size()) != m)
        throw std::invalid_argument("path must contain one node per layer");

    std::vector<TrainPath> group;
    int half = g.mult == 2 ? T / 2 : 0;

    for (int dup = 0; dup < g.mult; ++dup) {
        int off = dup * half;

        TrainPath fwd;
        fwd.line = g.line;
        fwd.direction = g.travel_dir;
        fwd.dup = dup;
        fwd.visits.resize(n);
        fwd.parallel.resize(m);
        for (int v = 0; v < n; ++v)
            fwd.visits[v].station = g.joint_station[v];
        for (int j = 0; j < m; ++j) {
            fwd.visits[j].dep = pmod(g.out_dep(path[j]) + off, T);
            fwd.visits[j + 1].arr = pmod(g.out_arr(path[j]) + off, T);
            fwd.parallel[j] = g.node_c(path[j]);
        }
        fwd.visits[0].arr = fwd.visits[0].dep;
        fwd.visits[n - 1].dep = fwd.visits[n - 1].arr;
        int dur = 0;
        for (int v = 0; v + 1 < n; ++v) {
            dur += cyc_delta(fwd.visits[v].arr, fwd.visits[v].dep, T);
            dur += cyc_delta(fwd.visits[v].dep, fwd.visits[v + 1].arr, T);
        }
        dur += cyc_delta(fwd.visits[n - 1].arr, fwd.visits[n - 1].dep, T);
        fwd.duration = dur;
        group.push_back(std::move(fwd));

        if (g.rush) continue;

        TrainPath bwd;
        bwd.line = g.line;
        bwd.direction = g.travel_dir == kOutbound ? kInbound : kOutbound;
        bwd.dup = dup;
        bwd.visits.resize(n);
        bwd.parallel.resize(m);
        // Travel order of the opposite train is the reverse of the layers.
        for (int v = 0; v < n; ++v) {
            int jpos = m - v;  // joint index along layer order
            bwd.visits[v].station = g.joint_station[jpos];
            if (jpos <= m - 1) bwd.visits[v].arr = pmod(g.in_arr(path[jpos]) + off, T);
            if (jpos >= 1) bwd.visits[v].dep = pmod(g.in_dep(path[jpos - 1]) + off, T);
        }
        bwd.visits[0].arr = bwd.visits[0].dep;
        bwd.visits[n - 1].dep = bwd.visits[n - 1].arr;
        for (int h = 0; h < m; ++h)
            bwd.parallel[h] = g.node_c(path[m - 1 - h]);
        dur = 0;
        for (int v = 0; v + 1 < n; ++v) {
            dur += cyc_delta(bwd.visits[v].arr, bwd.visits[v].dep, T);
            dur += cyc_delta(bwd.visits[v].dep, bwd.visits[v + 1].arr, T);
        }
        dur += cyc_delta(bwd.visits[n - 1].arr, bwd.visits[n - 1].dep, T);
        bwd.duration = dur;
        group.push_back(std::move(bwd));
    }
    return group;
}

long long arc_dwell_cost(const LineGraph& g, int pred, int node) {
    long long dw = cyc_delta(g.out_arr(pred), g.out_dep(node), g.T);
    if (!g.rush) dw += cyc_delta(g.in_arr(node), g.in_dep(pred), g.T);
    return dw * g.mult;
}

long long path_cost(const NetworkInstance& inst, const LineGraph& g,
                    const std::vector<int>& path) {
    (void)inst;
    long long cost = g.base_cost;
    for (size_t j = 1; j < path.size(); ++j)
        cost += arc_dwell_cost(g, path[j - 1], path[j]);
    return cost;
}

std::vector<std::vector<int>> enumerate_paths(const LineGraph& g, size_t limit) {
    // Successor lists derived from predecessor iteration.
    std::vector<std::vector<int>> succ(g.slots());
    for (int id = 0; id < g.slots(); ++id) {
        if (!g.valid[id] || g.node_layer(id) == 0) continue;
        for_each_pred(g, id, [&](int pred) { succ[pred].push_back(id); });
    }
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(int)> dfs = [&](int id) {
        cur.push_back(id);
        if (g.node_layer(id) == g.layers - 1) {
            if (out.size() >= limit)
                throw std::runtime_error("path enumeration limit exceeded");
            out.push_back(cur);
        } else {
            for (int nxt : succ[id]) dfs(nxt);
        }
        cur.pop_back();
    };
    for (int t = 0; t < g.T; ++t)
        for (int si = 0; si < g.S; ++si)
            for (int c = 0; c < g.P; ++c) {
                int id = g.node_id(0, t, si, c);
                if (g.valid[id]) dfs(id);
            }
    return out;
}

}  // namespace takt
