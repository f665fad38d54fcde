#pragma once

#include <vector>

#include "takt/linegraph.hpp"
#include "takt/master.hpp"

namespace takt {

// Shortest-path pricing over one line graph.  Every master row contributes a
// per-node penalty (packing rows are node-additive for feasible paths because
// their windows never catch two events of the same path; routing cuts are
// node-additive by construction), so a plain layer-by-layer DP finds the
// minimum reduced-cost schedule group.  Routing-cut duals can push node
// penalties below zero; the DP does not care since the graph is layered.

struct PricedPath {
    std::vector<int> path;
    long long cost = 0;        // plain timetabling cost
    double reduced_cost = 0.0;
};

// Per-node penalty table for one line, exposed for tests.
std::vector<double> pricing_penalties(const NetworkInstance& inst, const LineGraph& g,
                                      const DualSnapshot& duals, int line);

// Frozen predecessor lists in CSR form, arcs[start[id]..start[id+1]) in
// for_each_pred order.  The graph never changes after construction, so a
// caller that prices repeatedly builds this once and skips the per-arc
// window, platform and chain checks on every later round.
struct LineAdjacency {
    std::vector<int> start;  // slots() + 1
    std::vector<int> pred;
    std::vector<int> cost;   // dwell cost of the arc
};
LineAdjacency build_adjacency(const LineGraph& g);

// fixed: one entry per layer, -1 = free, otherwise the only allowed node id.
// Returns up to max_paths distinct paths with reduced cost < -1e-6, best
// first.  Ties inside the DP break toward smaller node ids.  adj, when given,
// must be build_adjacency(g).
std::vector<PricedPath> price_line(const NetworkInstance& inst, const LineGraph& g,
                                   const DualSnapshot& duals, int line,
                                   const std::vector<int>& fixed, int max_paths,
                                   const LineAdjacency* adj = nullptr);

// Same DP without the negativity filter: best path regardless of sign.
// Used to seed the master and by tests.
PricedPath best_path(const NetworkInstance& inst, const LineGraph& g,
                     const DualSnapshot& duals, int line, const std::vector<int>& fixed,
                     const LineAdjacency* adj = nullptr);

}  // namespace takt
