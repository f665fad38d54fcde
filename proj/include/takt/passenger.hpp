#pragma once

#include <unordered_map>
#include <vector>

#include "takt/flowcuts.hpp"
#include "takt/instance.hpp"
#include "takt/master.hpp"
#include "takt/timetable.hpp"

namespace takt {

// Passenger routing on a time-expanded graph with one node per
// (line, position along the line, instant).  Ride arcs follow train
// movements, wait arcs tick one instant at stop stations, transfer arcs jump
// between lines at shared stop stations and cost the minimum transfer time.
// Sources enter every boarding instant at the origin for free (or at a cost
// equal to the instant when origin waiting is counted), so passengers adapt
// to the timetable.
//
// Integral timetables are routed with plain Dijkstra per commodity.  For
// fractional master points the router solves a unit min-cost flow over all
// candidate ride arcs with capacities max(weight, eps) and returns an
// optimality cut from the flow duals.

struct RoutingOptions {
    bool count_origin_wait = false;
    double eps = 1e-4;
};

struct RouteLeg {
    int line = -1;
    int board_station = -1;
    int alight_station = -1;
    int board_t = 0;
    int alight_t = 0;
};

struct CommodityRoute {
    int commodity = -1;
    double time = 0.0;  // per passenger
    std::vector<RouteLeg> legs;
};

struct LpRouteResult {
    double value = 0.0;  // per passenger
    FlowCut cut;
};

class PassengerRouter {
  public:
    PassengerRouter(const NetworkInstance& inst, RoutingOptions opt);

    // Total perceived travel time (demand-weighted sum over all commodities)
    // for an integral timetable.  Optionally reports per-commodity times and
    // reconstructed routes.  Returns +inf if any commodity has no route.
    double route_integral(const TimetableSolution& sol,
                          std::vector<double>* per_commodity = nullptr,
                          std::vector<CommodityRoute>* routes = nullptr) const;

    // Unit min-cost flow for one commodity with arc capacities
    // max(weights[key], eps); weights omit keys with zero weight.
    LpRouteResult route_lp(const std::unordered_map<long long, double>& weights,
                           int commodity) const;

    // Demand-weighted lower bound on the total perceived travel time over
    // all timetables: rides at pure running time plus minimum dwell,
    // transfers cost exactly the minimum transfer time.
    double ptt_lower_bound() const;
    // per-commodity idealized lower bounds (instants); 0 when unreachable
    std::vector<double> commodity_lower_bounds() const;

    int num_commodities() const { return static_cast<int>(inst_.od.size()); }

  private:
    struct StaticArc {
        int from;
        int to;
        int cost;
        long long key;  // ride arcs only, -1 otherwise
        int line;       // ride/transfer target line, -1 wait
    };

    int node(int line, int pos, int t) const { return base_[line] + pos * T_ + t; }
    void build_static();
    void add_ride_arcs(std::vector<StaticArc>& arcs, bool all_times,
                       const std::unordered_map<long long, double>* operated) const;

    const NetworkInstance& inst_;
    RoutingOptions opt_;
    int T_;
    std::vector<int> base_;  // line -> first node id
    int num_nodes_ = 0;
    std::vector<StaticArc> wait_arcs_;
    std::vector<StaticArc> transfer_arcs_;
    // stop positions per (station): (line, pos) pairs where the line stops
    std::vector<std::vector<std::pair<int, int>>> stops_at_;
};

// Sum of column weights per ride-arc key at the master's last LP point.
std::unordered_map<long long, double> arc_weights(const Master& m);

}  // namespace takt
