#pragma once

#include <cstdint>
#include <vector>

#include "takt/periodic.hpp"
#include "takt/timetable.hpp"

namespace takt {

// Layered DAG of joint schedule states for one line. A node fixes, for one
// segment (in travel order), the outbound departure instant at its tail, the
// symmetry offset s (outbound departure + inbound arrival = T + s at the tail
// station) and the track choice on quadruple segments. One node therefore
// pins four train events at once: outbound dep/arr and the symmetric inbound
// dep/arr on the same segment. Frequency-2 lines add the half-period copies
// implicitly. Rush-hour lines run one direction only: their nodes carry no
// symmetry offset (S collapses to 1) and pin two events.
//
// Nodes whose own four (eight) events already clash - single-track meets,
// duplicate-train headways, platform spacing at the tail/head - are marked
// invalid at build time, as are arcs that break dwell windows, symmetry at
// the joint, quadruple-chain continuity or platform spacing across the joint.
struct LineGraph {
    int line = -1;
    int T = 0;
    int kappa = 0;
    int S = 1;        // symmetry offsets per node: 2*kappa + 1, or 1 for rush
    int P = 1;        // max parallel tracks over the line's segments
    int layers = 0;   // segment count, travel order
    bool rush = false;
    int travel_dir = kOutbound;  // direction layer order follows
    int mult = 1;                // trains per direction (frequency)

    std::vector<uint8_t> valid;

    // Per layer, travel order.
    std::vector<int> seg;           // segment id
    std::vector<int> par_tracks;    // parallel tracks on that segment
    std::vector<int> phi_out;       // running time, travel direction
    std::vector<int> phi_in;        // running time, opposite direction (0 for rush)
    std::vector<uint8_t> quad_chain_link;  // layer j>0: same quad chain as j-1
    // Joint station between layers j-1 and j (index 1..layers-1), plus the
    // end stations at index 0 and layers.
    std::vector<int> joint_station;
    std::vector<int> dwell_lo_out, dwell_hi_out;  // at joint j, travel dir
    std::vector<int> dwell_lo_in, dwell_hi_in;    // at joint j, opposite dir
    std::vector<uint8_t> joint_single_platform;
    std::vector<int> joint_platform_hw;

    long long base_cost = 0;  // mult * sum of all running times, both directions

    int slots() const { return layers * T * S * P; }
    int node_id(int layer, int t, int s_index, int c) const {
        return ((layer * T + t) * S + s_index) * P + c;
    }
    int node_layer(int id) const { return id / (T * S * P); }
    int node_t(int id) const { return (id / (S * P)) % T; }
    int node_s_index(int id) const { return (id / P) % S; }
    int node_s(int id) const { return node_s_index(id) - kappa; }
    int node_c(int id) const { return id % P; }
    bool is_valid(int id) const { return id >= 0 && id < slots() && valid[id]; }

    // Implied event times for a node (travel-direction train, dup 0).
    int out_dep(int id) const { return node_t(id); }
    int out_arr(int id) const {
        return pmod(node_t(id) + phi_out[node_layer(id)], T);
    }
    // Opposite train (regular lines only).
    int in_arr(int id) const { return pmod(node_s(id) - node_t(id), T); }
    int in_dep(int id) const {
        return pmod(node_s(id) - node_t(id) - phi_in[node_layer(id)], T);
    }
};

LineGraph build_line_graph(const NetworkInstance& inst, int line_id);

// All events a node's trains generate, dup copies included.
void append_node_events(const NetworkInstance& inst, const LineGraph& g, int node,
                        std::vector<TrackEvent>& out);

// The scheduled trains a full source-sink path (one node per layer) decodes
// to: 2 per frequency unit for regular lines, 1 for rush-hour lines.
std::vector<TrainPath> decode_path(const NetworkInstance& inst, const LineGraph& g,
                                   const std::vector<int>& path);

// Sum of decoded train durations.
long long path_cost(const NetworkInstance& inst, const LineGraph& g,
                    const std::vector<int>& path);

// Dwell cost added when arriving at `node` from `pred` across the joint.
long long arc_dwell_cost(const LineGraph& g, int pred, int node);

// Exhaustive path enumeration, for oracles and tiny instances. Throws if
// more than `limit` paths exist.
std::vector<std::vector<int>> enumerate_paths(const LineGraph& g, size_t limit);

// Predecessor iteration: calls f(pred_id) for every valid arc pred -> node.
// Both endpoints are valid nodes and the arc passes all joint checks.
template <class F>
void for_each_pred(const LineGraph& g, int node, F&& f) {
    int layer = g.node_layer(node);
    if (layer == 0) return;
    int T = g.T;
    int t = g.node_t(node);
    int s = g.node_s(node);
    int c = g.node_c(node);
    int j = layer;  // joint index
    bool chained = g.quad_chain_link[layer] != 0;
    for (int dw_out = g.dwell_lo_out[j]; dw_out <= g.dwell_hi_out[j]; ++dw_out) {
        int tp = pmod(t - dw_out - g.phi_out[layer - 1], T);
        if (g.rush) {
            for (int cp = 0; cp < g.par_tracks[layer - 1]; ++cp) {
                if (chained && cp != c) continue;
                int pred = g.node_id(layer - 1, tp, 0, cp);
                if (g.valid[pred]) f(pred);
            }
            continue;
        }
        for (int dw_in = g.dwell_lo_in[j]; dw_in <= g.dwell_hi_in[j]; ++dw_in) {
            // dwell_in = (sp - tp - phi_in[layer-1]) - (s - t) mod T
            int sp_raw = pmod(dw_in + s - t + tp + g.phi_in[layer - 1], T);
            int sp;
            if (sp_raw <= g.kappa)
                sp = sp_raw;
            else if (sp_raw >= T - g.kappa)
                sp = sp_raw - T;
            else
                continue;
            // Platform spacing across the joint: travel-dir arrival (from pred)
            // against opposite-dir arrival (from node), dup copies included.
            if (g.joint_single_platform[j]) {
                int hw = g.joint_platform_hw[j];
                int a_out = pmod(tp + g.phi_out[layer - 1], T);
                int a_in = pmod(s - t, T);
                bool clash = cyc_dist(a_out, a_in, T) < hw;
                if (!clash && g.mult == 2)
                    clash = cyc_dist(a_out, pmod(a_in + T / 2, T), T) < hw;
                if (clash) continue;
            }
            for (int cp = 0; cp < g.par_tracks[layer - 1]; ++cp) {
                if (chained && cp != c) continue;
                int pred = g.node_id(layer - 1, tp, sp + g.kappa, cp);
                if (g.valid[pred]) f(pred);
            }
        }
    }
}

}  // namespace takt
