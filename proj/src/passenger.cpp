#include "takt/passenger.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace takt {

namespace {
constexpr double kInfD = std::numeric_limits<double>::infinity();
constexpr int kInfI = std::numeric_limits<int>::max() / 4;
}  // namespace

PassengerRouter::PassengerRouter(const NetworkInstance& inst, RoutingOptions opt)
    : inst_(inst), opt_(opt), T_(inst.params.period) {
    base_.resize(inst_.lines.size());
    int id = 0;
    for (size_t l = 0; l < inst_.lines.size(); ++l) {
        base_[l] = id;
        id += inst_.lines[l].num_stations() * T_;
    }
    num_nodes_ = id;

    stops_at_.resize(inst_.stations.size());
    for (size_t l = 0; l < inst_.lines.size(); ++l) {
        const Line& line = inst_.lines[l];
        for (int p = 0; p < line.num_stations(); ++p)
            if (line.stops[p])
                stops_at_[line.stations[p]].push_back({static_cast<int>(l), p});
    }
    build_static();
}

void PassengerRouter::build_static() {
    for (size_t l = 0; l < inst_.lines.size(); ++l) {
        const Line& line = inst_.lines[l];
        for (int p = 0; p < line.num_stations(); ++p) {
            if (!line.stops[p]) continue;
            for (int t = 0; t < T_; ++t)
                wait_arcs_.push_back({node(static_cast<int>(l), p, t),
                                      node(static_cast<int>(l), p, (t + 1) % T_), 1, -1,
                                      -1});
        }
    }
    int mt = inst_.params.min_transfer;
    for (size_t s = 0; s < stops_at_.size(); ++s) {
        for (auto [l1, p1] : stops_at_[s])
            for (auto [l2, p2] : stops_at_[s]) {
                if (l1 == l2) continue;
                for (int t = 0; t < T_; ++t)
                    transfer_arcs_.push_back(
                        {node(l1, p1, t), node(l2, p2, (t + mt) % T_), mt, -1, l2});
            }
    }
}

void PassengerRouter::add_ride_arcs(
    std::vector<StaticArc>& arcs, bool all_times,
    const std::unordered_map<long long, double>* operated) const {
    if (!all_times && operated) {
        for (const auto& [key, w] : *operated) {
            if (w < 0.5) continue;
            RideArcRef r = decode_ride_arc(key);
            const Line& line = inst_.lines[r.line];
            int n = line.num_stations();
            int pf = r.dir == kOutbound ? r.hop : n - 1 - r.hop;
            int pt = r.dir == kOutbound ? r.hop + 1 : n - 2 - r.hop;
            int run = line.run[r.dir][hop_segment_position(line, r.dir, r.hop)];
            arcs.push_back({node(r.line, pf, r.tau), node(r.line, pt, (r.tau + run) % T_),
                            run, key, r.line});
        }
        return;
    }
    for (size_t l = 0; l < inst_.lines.size(); ++l) {
        const Line& line = inst_.lines[l];
        int n = line.num_stations();
        int m = line.num_segments();
        for (int dir = 0; dir < 2; ++dir) {
            if (line.rush_hour && dir != line.rush_direction) continue;
            for (int h = 0; h < m; ++h) {
                int pf = dir == kOutbound ? h : n - 1 - h;
                int pt = dir == kOutbound ? h + 1 : n - 2 - h;
                int run = line.run[dir][hop_segment_position(line, dir, h)];
                for (int tau = 0; tau < T_; ++tau)
                    arcs.push_back({node(static_cast<int>(l), pf, tau),
                                    node(static_cast<int>(l), pt, (tau + run) % T_), run,
                                    ride_arc_key(static_cast<int>(l), dir, h, tau),
                                    static_cast<int>(l)});
            }
        }
    }
}

double PassengerRouter::route_integral(const TimetableSolution& sol,
                                       std::vector<double>* per_commodity,
                                       std::vector<CommodityRoute>* routes) const {
    std::unordered_map<long long, double> operated;
    for (const TrainPath& tp : sol.trains) {
        int n = static_cast<int>(tp.visits.size());
        for (int v = 0; v + 1 < n; ++v)
            operated[ride_arc_key(tp.line, tp.direction, v, tp.visits[v].dep)] = 1.0;
    }

    std::vector<StaticArc> arcs = wait_arcs_;
    arcs.insert(arcs.end(), transfer_arcs_.begin(), transfer_arcs_.end());
    add_ride_arcs(arcs, false, &operated);

    std::vector<std::vector<int>> adj(num_nodes_);
    for (size_t i = 0; i < arcs.size(); ++i) adj[arcs[i].from].push_back(static_cast<int>(i));

    if (per_commodity) per_commodity->assign(inst_.od.size(), 0.0);
    double total = 0.0;

    std::vector<int> dist(num_nodes_), par(num_nodes_);
    for (size_t k = 0; k < inst_.od.size(); ++k) {
        const ODEntry& od = inst_.od[k];
        std::fill(dist.begin(), dist.end(), kInfI);
        std::fill(par.begin(), par.end(), -1);
        using QE = std::pair<int, int>;
        std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
        for (auto [l, p] : stops_at_[od.from])
            for (int t = 0; t < T_; ++t) {
                int u = node(l, p, t);
                int d0 = opt_.count_origin_wait ? t : 0;
                if (d0 < dist[u]) {
                    dist[u] = d0;
                    pq.push({d0, u});
                }
            }
        while (!pq.empty()) {
            auto [d, u] = pq.top();
            pq.pop();
            if (d > dist[u]) continue;
            for (int ai : adj[u]) {
                const StaticArc& a = arcs[ai];
                int nd = d + a.cost;
                if (nd < dist[a.to]) {
                    dist[a.to] = nd;
                    par[a.to] = ai;
                    pq.push({nd, a.to});
                }
            }
        }
        int best = kInfI, best_node = -1;
        for (auto [l, p] : stops_at_[od.to])
            for (int t = 0; t < T_; ++t) {
                int u = node(l, p, t);
                if (dist[u] < best) {
                    best = dist[u];
                    best_node = u;
                }
            }
        if (best >= kInfI) return kInfD;
        if (per_commodity) (*per_commodity)[k] = best;
        total += static_cast<double>(od.demand) * best;

        if (routes) {
            CommodityRoute cr;
            cr.commodity = static_cast<int>(k);
            cr.time = best;
            std::vector<int> rev;
            for (int u = best_node; par[u] >= 0; u = arcs[par[u]].from) rev.push_back(par[u]);
            std::reverse(rev.begin(), rev.end());
            for (int ai : rev) {
                const StaticArc& a = arcs[ai];
                if (a.key < 0) continue;  // wait or transfer
                RideArcRef r = decode_ride_arc(a.key);
                const Line& line = inst_.lines[r.line];
                int pf = r.dir == kOutbound ? r.hop : line.num_stations() - 1 - r.hop;
                int pt = r.dir == kOutbound ? r.hop + 1 : line.num_stations() - 2 - r.hop;
                int sf = line.stations[pf], st = line.stations[pt];
                int arr_t = (r.tau + a.cost) % T_;
                if (!cr.legs.empty() && cr.legs.back().line == r.line &&
                    cr.legs.back().alight_station == sf) {
                    cr.legs.back().alight_station = st;
                    cr.legs.back().alight_t = arr_t;
                } else {
                    cr.legs.push_back({r.line, sf, st, r.tau, arr_t});
                }
            }
            routes->push_back(std::move(cr));
        }
    }
    return total;
}

LpRouteResult PassengerRouter::route_lp(
    const std::unordered_map<long long, double>& weights, int commodity) const {
    struct FA {
        int to;
        double cap;
        int cost;
        int rev;
    };
    int N = num_nodes_ + 2;
    int src = num_nodes_, snk = num_nodes_ + 1;
    std::vector<std::vector<FA>> g(N);
    auto add_edge = [&](int u, int v, double cap, int cost) {
        g[u].push_back({v, cap, cost, static_cast<int>(g[v].size())});
        g[v].push_back({u, 0.0, -cost, static_cast<int>(g[u].size()) - 1});
    };

    for (const StaticArc& a : wait_arcs_) add_edge(a.from, a.to, 1e18, a.cost);
    for (const StaticArc& a : transfer_arcs_) add_edge(a.from, a.to, 1e18, a.cost);

    std::vector<StaticArc> rides;
    add_ride_arcs(rides, true, nullptr);
    struct RideRef {
        long long key;
        int u;
        int idx;
        int cost;
        int to;
    };
    std::vector<RideRef> refs;
    refs.reserve(rides.size());
    for (const StaticArc& a : rides) {
        auto it = weights.find(a.key);
        double cap = std::max(it == weights.end() ? 0.0 : it->second, opt_.eps);
        refs.push_back({a.key, a.from, static_cast<int>(g[a.from].size()), a.cost, a.to});
        add_edge(a.from, a.to, cap, a.cost);
    }

    const ODEntry& od = inst_.od[commodity];
    for (auto [l, p] : stops_at_[od.from])
        for (int t = 0; t < T_; ++t)
            add_edge(src, node(l, p, t), 1e18, opt_.count_origin_wait ? t : 0);
    for (auto [l, p] : stops_at_[od.to])
        for (int t = 0; t < T_; ++t) add_edge(node(l, p, t), snk, 1e18, 0);

    std::vector<double> pot(N, 0.0), dist(N);
    std::vector<int> par_node(N), par_arc(N);
    double flow = 0.0, value = 0.0;
    int guard = 0;

    LpRouteResult out;
    while (flow < 1.0 - 1e-12) {
        std::fill(dist.begin(), dist.end(), kInfD);
        dist[src] = 0.0;
        using QE = std::pair<double, int>;
        std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
        pq.push({0.0, src});
        while (!pq.empty()) {
            auto [d, u] = pq.top();
            pq.pop();
            if (d > dist[u] + 1e-12) continue;
            for (size_t i = 0; i < g[u].size(); ++i) {
                const FA& a = g[u][i];
                if (a.cap <= 1e-12) continue;
                double rc = a.cost + pot[u] - pot[a.to];
                if (rc < 0.0) rc = 0.0;
                double nd = d + rc;
                if (nd + 1e-12 < dist[a.to]) {
                    dist[a.to] = nd;
                    par_node[a.to] = u;
                    par_arc[a.to] = static_cast<int>(i);
                    pq.push({nd, a.to});
                }
            }
        }
        if (dist[snk] == kInfD) {
            out.value = kInfD;
            return out;
        }
        double dsink = dist[snk];
        for (int v = 0; v < N; ++v) pot[v] += std::min(dist[v], dsink);

        double push = 1.0 - flow;
        for (int v = snk; v != src; v = par_node[v])
            push = std::min(push, g[par_node[v]][par_arc[v]].cap);
        for (int v = snk; v != src; v = par_node[v]) {
            FA& a = g[par_node[v]][par_arc[v]];
            a.cap -= push;
            g[v][a.rev].cap += push;
            value += push * a.cost;
        }
        flow += push;
        if (++guard > 200000) break;  // duals below stay valid regardless
    }

    out.value = value;
    out.cut.commodity = commodity;
    out.cut.rhs = pot[snk] - pot[src];
    for (const RideRef& r : refs) {
        double pi = r.cost + pot[r.u] - pot[r.to];
        if (pi < -1e-12) out.cut.arc_pi[r.key] = pi;
    }
    return out;
}

std::vector<double> PassengerRouter::commodity_lower_bounds() const {
    // idealized graph: hub per station, arr/dep node per (stop, line)
    int S = static_cast<int>(inst_.stations.size());
    std::vector<std::vector<int>> pair_id(inst_.lines.size());
    int id = S;
    for (size_t l = 0; l < inst_.lines.size(); ++l) {
        pair_id[l].assign(inst_.lines[l].num_stations(), -1);
        for (int p = 0; p < inst_.lines[l].num_stations(); ++p)
            if (inst_.lines[l].stops[p]) {
                pair_id[l][p] = id;  // arr node; dep node is id+1
                id += 2;
            }
    }
    int N = id;
    struct A {
        int to;
        int cost;
    };
    std::vector<std::vector<A>> adj(N);
    int mt = inst_.params.min_transfer;

    for (size_t l = 0; l < inst_.lines.size(); ++l) {
        const Line& line = inst_.lines[l];
        int n = line.num_stations();
        for (int p = 0; p < n; ++p) {
            if (pair_id[l][p] < 0) continue;
            int arr = pair_id[l][p], dep = arr + 1;
            adj[arr].push_back({line.stations[p], 0});        // alight
            adj[line.stations[p]].push_back({dep, mt});       // board
        }
        for (int dir = 0; dir < 2; ++dir) {
            if (line.rush_hour && dir != line.rush_direction) continue;
            // consecutive stops in travel order
            int prev = -1;
            for (int step = 0; step < n; ++step) {
                int pos = dir == kOutbound ? step : n - 1 - step;
                if (!line.stops[pos]) continue;
                if (prev >= 0) {
                    int run = 0;
                    int lo = std::min(prev, pos), hi = std::max(prev, pos);
                    for (int sp = lo; sp < hi; ++sp) run += line.run[dir][sp];
                    adj[pair_id[l][prev] + 1].push_back({pair_id[l][pos], run});
                    // riding through: pay the minimum dwell before continuing
                    if (pos > 0 && pos < n - 1)
                        adj[pair_id[l][pos]].push_back(
                            {pair_id[l][pos] + 1, line.min_dwell[dir][pos - 1]});
                }
                prev = pos;
            }
        }
    }

    std::vector<double> lb(inst_.od.size(), 0.0);
    std::vector<int> dist(N);
    for (size_t k = 0; k < inst_.od.size(); ++k) {
        const ODEntry& od = inst_.od[k];
        std::fill(dist.begin(), dist.end(), kInfI);
        using QE = std::pair<int, int>;
        std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
        for (auto [l, p] : stops_at_[od.from]) {
            int dep = pair_id[l][p] + 1;
            dist[dep] = 0;
            pq.push({0, dep});
        }
        while (!pq.empty()) {
            auto [d, u] = pq.top();
            pq.pop();
            if (d > dist[u]) continue;
            for (const A& a : adj[u])
                if (d + a.cost < dist[a.to]) {
                    dist[a.to] = d + a.cost;
                    pq.push({dist[a.to], a.to});
                }
        }
        if (dist[od.to] < kInfI) lb[k] = dist[od.to];
    }
    return lb;
}

double PassengerRouter::ptt_lower_bound() const {
    auto lb = commodity_lower_bounds();
    double total = 0.0;
    for (size_t k = 0; k < lb.size(); ++k)
        total += static_cast<double>(inst_.od[k].demand) * lb[k];
    return total;
}

std::unordered_map<long long, double> arc_weights(const Master& m) {
    std::unordered_map<long long, double> w;
    for (size_t idx = 0; idx < m.num_columns(); ++idx) {
        double x = m.column_value(static_cast<int>(idx));
        const Column& col = m.column(static_cast<int>(idx));
        if (x <= 1e-9 || col.dummy) continue;
        for (long long k : col.arcs) w[k] += x;
    }
    return w;
}

}  // namespace takt
