#include "takt/search.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "takt/conflicts.hpp"
#include "takt/linegraph.hpp"
#include "takt/master.hpp"
#include "takt/passenger.hpp"
#include "takt/pricing.hpp"
#include "takt/separation.hpp"

namespace takt {

const char* search_method_name(SearchMethod m) {
    switch (m) {
        case SearchMethod::lns: return "lns";
        case SearchMethod::lns_pl_accept: return "lns-pl-accept";
        case SearchMethod::lns_benders: return "lns-benders";
        case SearchMethod::random_restart: return "random";
    }
    return "?";
}

std::optional<SearchMethod> parse_search_method(const std::string& s) {
    if (s == "lns") return SearchMethod::lns;
    if (s == "lns-pl-accept") return SearchMethod::lns_pl_accept;
    if (s == "lns-benders") return SearchMethod::lns_benders;
    if (s == "random") return SearchMethod::random_restart;
    return std::nullopt;
}

DirectionSplit split_directions(const NetworkInstance& inst) {
    DirectionSplit out;
    out.inst = inst;
    out.inst.lines.clear();
    out.inst.siblings.clear();
    std::vector<std::pair<int, int>> at(inst.lines.size(), {-1, -1});
    for (size_t l = 0; l < inst.lines.size(); ++l) {
        const Line& ln = inst.lines[l];
        if (ln.rush_hour) {
            at[l] = {static_cast<int>(out.inst.lines.size()), -1};
            out.inst.lines.push_back(ln);
            continue;
        }
        if (ln.frequency != 1)
            throw std::runtime_error(
                "per-direction baseline handles frequency-1 lines only: " + ln.name);
        Line a = ln;
        a.name += "_out";
        a.rush_hour = true;
        a.rush_direction = kOutbound;
        Line b = ln;
        b.name += "_in";
        b.rush_hour = true;
        b.rush_direction = kInbound;
        at[l] = {static_cast<int>(out.inst.lines.size()),
                 static_cast<int>(out.inst.lines.size()) + 1};
        out.inst.lines.push_back(std::move(a));
        out.inst.lines.push_back(std::move(b));
        out.pairs.push_back(at[l]);
    }
    // sibling spread applies to every traversal of the shared segment, so a
    // split pair expands to all cross combinations that still exist
    for (auto [a, b] : inst.siblings)
        for (int x : {at[a].first, at[a].second})
            for (int y : {at[b].first, at[b].second})
                if (x >= 0 && y >= 0) out.inst.siblings.emplace_back(x, y);
    return out;
}

namespace {

using Clock = std::chrono::steady_clock;

struct PhaseTimer {
    double* acc;
    Clock::time_point t0;
    explicit PhaseTimer(double* a) : acc(a), t0(Clock::now()) {}
    ~PhaseTimer() {
        *acc += std::chrono::duration<double>(Clock::now() - t0).count();
    }
};

struct Candidate {
    TimetableSolution sol;
    std::vector<std::vector<int>> paths;
    double ptt = std::numeric_limits<double>::infinity();
    long long pl = 0;
    int conflicts = 0;
};

class Searcher {
  public:
    Searcher(const NetworkInstance& inst, const SearchOptions& opt)
        : opt_(opt), rng_(opt.seed) {
        if (opt_.train_graph_mode) {
            split_ = split_directions(inst);
            work_ = &split_->inst;
            dir_pairs_ = split_->pairs;
        } else {
            work_ = &inst;
        }
        t0_ = Clock::now();
        double lim = std::max(0.01, opt_.time_limit);
        deadline_ = t0_ + std::chrono::duration_cast<Clock::duration>(
                              std::chrono::duration<double>(lim));
        for (int l = 0; l < num_lines(); ++l)
            graphs_.push_back(build_line_graph(*work_, l));
        for (int l = 0; l < num_lines(); ++l) adj_.push_back(build_adjacency(graphs_[l]));
        router_.emplace(*work_, RoutingOptions{opt_.count_origin_wait, opt_.eps});
        z_lb_ = router_->commodity_lower_bounds();
        MasterOptions mo;
        mo.lazy_headways = opt_.lazy_headways;
        mo.alpha = opt_.alpha > 0 ? opt_.alpha : work_->effective_alpha();
        mo.z_lower = z_lb_;
        master_.emplace(*work_, graphs_, mo);
        // A single LP solve is otherwise uninterruptible; degenerate stalls
        // there must not be able to blow the run's wall-clock budget.
        master_->set_interrupt([this] { return expired(); });
        masks_.resize(num_lines());
        for (int l = 0; l < num_lines(); ++l)
            masks_[l].assign(graphs_[l].layers, -1);
        if (!opt_.trace_path.empty()) trace_.open(opt_.trace_path);
        res_.method = opt_.method;
        res_.seed = opt_.seed;
    }

    SearchResult run() {
        trace({{"ev", "run_start"},
               {"method", search_method_name(opt_.method)},
               {"seed", opt_.seed},
               {"lines", num_lines()},
               {"commodities", work_->od.size()},
               {"per_direction", opt_.train_graph_mode}});
        for (size_t k = 0; k < z_lb_.size(); ++k)
            res_.ptt_lb += work_->od[k].demand * z_lb_[k];
        seed_columns();
        root();
        if (!res_.proven_infeasible && !opt_.root_only && !expired()) outer_loop();
        return finish();
    }

  private:
    int num_lines() const { return static_cast<int>(work_->lines.size()); }
    bool expired() const { return Clock::now() >= deadline_; }
    double elapsed() const {
        return std::chrono::duration<double>(Clock::now() - t0_).count();
    }
    bool benders_enabled() const { return opt_.method == SearchMethod::lns_benders; }

    void trace(nlohmann::json j) {
        if (!trace_.is_open()) return;
        j["t"] = elapsed();
        trace_ << j.dump() << '\n';
        trace_.flush();
    }

    void seed_columns() {
        DualSnapshot zero;
        zero.cover.assign(num_lines(), 0.0);
        for (int l = 0; l < num_lines(); ++l) {
            PricedPath p = best_path(*work_, graphs_[l], zero, l, masks_[l], &adj_[l]);
            if (!p.path.empty()) master_->add_column(l, p.path);
        }
    }

    bool solve_master() {
        PhaseTimer t(&res_.t_master);
        LpSummary s = master_->solve_lp();
        res_.lp_pivots += s.lp_iterations;
        res_.lp_pivots_max = std::max(res_.lp_pivots_max, s.lp_iterations);
        ++res_.lp_solves;
        lp_failed_ = s.status != LpStatus::optimal;
        if (s.lp_iterations > 30000 && std::getenv("TT_LOG"))
            std::fprintf(stderr, "[search] heavy lp: %d pivots, %d rows, dive %d, t=%.1fs\n",
                         s.lp_iterations, master_->active_row_count(), res_.dives, elapsed());
        return !lp_failed_;
    }

    // one pricing round over every line; returns the number of new columns
    int price_all() {
        PhaseTimer t(&res_.t_pricing);
        DualSnapshot duals = master_->duals();
        int fresh = 0;
        for (int l = 0; l < num_lines(); ++l) {
            auto priced = price_line(*work_, graphs_[l], duals, l, masks_[l],
                                     opt_.multi_price, &adj_[l]);
            for (const PricedPath& p : priced)
                if (master_->add_column(l, p.path).second) ++fresh;
        }
        return fresh;
    }

    // column generation to exhaustion, then separation, until neither moves
    void col_gen_and_sep(bool at_root) {
        for (;;) {
            int round_cols = 0;
            for (;;) {
                if (!solve_master()) return;
                if (at_root) ++res_.root_cg_iterations;
                if (expired()) return;
                int fresh = price_all();
                round_cols += fresh;
                if (fresh == 0) break;
                if (expired()) return;
            }
            SeparationStats st;
            {
                PhaseTimer t(&res_.t_separation);
                st = separate(*master_, dir_pairs_);
            }
            res_.separated_rows += st.total();
            if (at_root && st.total() > 0)
                trace({{"ev", "root_round"},
                       {"columns", round_cols},
                       {"overtake", st.overtake},
                       {"crossing", st.crossing},
                       {"pool", st.pool_rows},
                       {"symmetry", st.symmetry},
                       {"objective", master_->objective()}});
            if (st.total() == 0) return;
            if (expired()) return;
        }
    }

    double ptt_bound() const {
        double b = 0.0;
        for (size_t k = 0; k < work_->od.size(); ++k)
            b += work_->od[k].demand * std::max(master_->z_value(static_cast<int>(k)),
                                                k < z_lb_.size() ? z_lb_[k] : 0.0);
        return b;
    }

    std::vector<int> benders_commodities() const {
        const auto& repr = work_->params.representative_stations;
        std::vector<int> out;
        if (repr.empty()) {
            out.resize(work_->od.size());
            std::iota(out.begin(), out.end(), 0);
            return out;
        }
        std::unordered_set<int> rs(repr.begin(), repr.end());
        for (size_t k = 0; k < work_->od.size(); ++k)
            if (rs.count(work_->od[k].from) && rs.count(work_->od[k].to))
                out.push_back(static_cast<int>(k));
        return out;
    }

    void benders_root() {
        double budget = opt_.benders_budget * std::max(0.01, opt_.time_limit);
        auto bend_end = std::min(
            deadline_, Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                          std::chrono::duration<double>(budget)));
        std::vector<int> comm = benders_commodities();
        int round = 0;
        while (Clock::now() < bend_end) {
            auto weights = arc_weights(*master_);
            int added = 0;
            for (int k : comm) {
                if (Clock::now() >= bend_end) break;
                LpRouteResult r;
                {
                    PhaseTimer t(&res_.t_routing);
                    r = router_->route_lp(weights, k);
                }
                if (!std::isfinite(r.value)) continue;
                double zk = std::max(master_->z_value(k),
                                     k < static_cast<int>(z_lb_.size()) ? z_lb_[k] : 0.0);
                double at_point = r.cut.rhs;
                for (const auto& [key, pi] : r.cut.arc_pi) {
                    auto it = weights.find(key);
                    if (it != weights.end()) at_point += pi * it->second;
                }
                if (zk < at_point - 1e-6) {
                    master_->add_flow_cut(std::move(r.cut));
                    ++added;
                }
            }
            ++round;
            trace({{"ev", "routing_cuts"},
                   {"round", round},
                   {"added", added},
                   {"total", master_->flow_cut_count()}});
            if (added == 0) break;
            col_gen_and_sep(true);
            if (expired()) break;
        }
    }

    void root() {
        col_gen_and_sep(true);
        if (lp_failed_ && !expired())
            throw std::runtime_error("master LP failed at the root node");
        res_.pl_root_lb = master_->objective();
        trace({{"ev", "root_lp"},
               {"objective", res_.pl_root_lb},
               {"cg_iterations", res_.root_cg_iterations},
               {"columns", master_->num_columns()},
               {"rows", master_->active_row_count()}});
        if (master_->dummy_active() && !expired()) {
            res_.proven_infeasible = true;
            trace({{"ev", "infeasible_root"}});
            return;
        }
        if (benders_enabled() && !expired()) benders_root();
        res_.root_objective = master_->objective();
        res_.root_ptt_bound = ptt_bound();
        trace({{"ev", "root_done"},
               {"objective", res_.root_objective},
               {"ptt_bound", res_.root_ptt_bound},
               {"ptt_lb", res_.ptt_lb},
               {"cuts", master_->flow_cut_count()}});
    }

    Candidate make_candidate(const std::vector<int>& cols, int fixes,
                             Clock::time_point dive_t0) {
        Candidate c;
        c.paths.resize(num_lines());
        for (int l = 0; l < num_lines(); ++l) {
            c.paths[l] = master_->column(cols[l]).path;
            auto trains = decode_path(*work_, graphs_[l], c.paths[l]);
            for (TrainPath& tp : trains) {
                c.sol.path_length += tp.duration;
                c.sol.trains.push_back(std::move(tp));
            }
        }
        c.pl = c.sol.path_length;
        ConflictReport rep = check_timetable(*work_, c.sol);
        c.conflicts = static_cast<int>(rep.conflicts.size());
        res_.checker_conflicts += c.conflicts;
        assert(rep.ok() && "dive produced a conflicted timetable");
        c.sol.feasible = rep.ok();
        {
            PhaseTimer t(&res_.t_routing);
            c.ptt = router_->route_integral(c.sol);
        }
        c.sol.ptt = c.ptt;
        trace({{"ev", "dive"},
               {"ok", true},
               {"ptt", std::isfinite(c.ptt) ? c.ptt : -1.0},
               {"pl", c.pl},
               {"fixes", fixes},
               {"conflicts", c.conflicts},
               {"seconds",
                std::chrono::duration<double>(Clock::now() - dive_t0).count()}});
        return c;
    }

    // One dive to integrality; pins fix whole lines to their incumbent paths.
    // No backtracking: a dead end (cover only satisfiable with a dummy)
    // aborts the dive and reports failure.
    std::optional<Candidate> dive(
        const std::vector<std::pair<int, std::vector<int>>>& pins) {
        master_->reset_column_bounds();
        {
            // Shed packing rows that went slack during recent dives; they
            // re-separate on demand.  Row removal keeps the warm basis, so
            // compacting every dive is cheap and holds the LP small; pivot
            // cost grows quadratically with the row count.
            PhaseTimer t(&res_.t_master);
            master_->compact_rows();
        }
        for (auto& m : masks_) std::fill(m.begin(), m.end(), -1);
        for (const auto& [l, path] : pins) {
            masks_[l] = path;
            master_->restrict_line_to_path(l, path);
        }
        ++res_.dives;
        int fixes = 0;
        auto dive_t0 = Clock::now();
        for (;;) {
            col_gen_and_sep(false);
            if (lp_failed_ || expired()) return std::nullopt;
            if (master_->dummy_active()) {
                trace({{"ev", "dive"}, {"ok", false}, {"fixes", fixes}});
                return std::nullopt;
            }
            if (auto cols = master_->integral_columns())
                return make_candidate(*cols, fixes, dive_t0);
            // fractional: every (line, node) with fractional usage is a
            // candidate; the pick is uniform, order fixed by node id
            std::vector<std::pair<int, int>> cand;
            for (int l = 0; l < num_lines(); ++l) {
                auto usage = master_->node_usage(l);
                std::vector<std::pair<int, double>> u(usage.begin(), usage.end());
                std::sort(u.begin(), u.end());
                for (auto& [node, w] : u)
                    if (w > 1e-6 && w < 1.0 - 1e-6) cand.emplace_back(l, node);
            }
            if (cand.empty()) {
                // integral usage but no integral column split; numeric dust
                trace({{"ev", "dive"}, {"ok", false}, {"fixes", fixes}});
                return std::nullopt;
            }
            auto [l, node] = cand[static_cast<size_t>(rng_() % cand.size())];
            int layer = graphs_[l].node_layer(node);
            masks_[l][layer] = node;
            master_->restrict_line_to_node(l, layer, node);
            ++fixes;
        }
    }

    // kept lines for the next repair dive; empty = dive from scratch
    std::vector<std::pair<int, std::vector<int>>> select_pins() {
        int L = num_lines();
        int rho = std::min(std::max(1, opt_.rho), L);
        if (opt_.method == SearchMethod::random_restart) rho = L;
        if (rho >= L) return {};
        std::vector<int> ids(L);
        std::iota(ids.begin(), ids.end(), 0);
        for (int i = 0; i < rho; ++i) {
            int j = i + static_cast<int>(rng_() % static_cast<uint64_t>(L - i));
            std::swap(ids[i], ids[j]);
        }
        std::vector<uint8_t> destroyed(L, 0);
        for (int i = 0; i < rho; ++i) destroyed[ids[i]] = 1;
        std::vector<std::pair<int, std::vector<int>>> pins;
        for (int l = 0; l < L; ++l)
            if (!destroyed[l]) pins.emplace_back(l, best_->paths[l]);
        return pins;
    }

    void maybe_accept(std::optional<Candidate>& cand) {
        if (!cand || cand->conflicts > 0) return;
        bool better;
        if (!best_)
            better = true;
        else if (opt_.method == SearchMethod::lns_pl_accept)
            better = cand->pl < best_->pl;
        else
            better = cand->ptt < best_->ptt - 1e-9;
        if (!better) return;
        best_ = std::move(*cand);
        ++res_.incumbent_updates;
        trace({{"ev", "incumbent"},
               {"ptt", std::isfinite(best_->ptt) ? best_->ptt : -1.0},
               {"pl", best_->pl},
               {"dives", res_.dives}});
    }

    void outer_loop() {
        while (!expired() &&
               (opt_.max_iterations == 0 || res_.dives < opt_.max_iterations)) {
            if (!best_) {
                auto cand = dive({});
                maybe_accept(cand);
                continue;
            }
            ++res_.outer_iterations;
            auto pins = select_pins();
            auto cand = dive(pins);
            maybe_accept(cand);
        }
    }

    SearchResult finish() {
        res_.wall_seconds = elapsed();
        res_.columns = static_cast<int>(master_->num_columns());
        res_.lp_rows = master_->active_row_count();
        res_.flow_cuts = master_->flow_cut_count();
        res_.hit_time_limit = expired();
        if (best_) {
            res_.found = true;
            res_.best = best_->sol;
            res_.best_paths = best_->paths;
            res_.best_ptt = best_->ptt;
            res_.best_pl = best_->pl;
        }
        trace({{"ev", "done"},
               {"found", res_.found},
               {"best_ptt", res_.found && std::isfinite(res_.best_ptt)
                                ? res_.best_ptt
                                : -1.0},
               {"best_pl", res_.best_pl},
               {"dives", res_.dives},
               {"outer_iterations", res_.outer_iterations},
               {"columns", res_.columns},
               {"rows", res_.lp_rows},
               {"cuts", res_.flow_cuts}});
        return res_;
    }

    SearchOptions opt_;
    std::optional<DirectionSplit> split_;
    const NetworkInstance* work_ = nullptr;
    std::vector<std::pair<int, int>> dir_pairs_;
    std::vector<LineGraph> graphs_;
    std::vector<LineAdjacency> adj_;
    std::optional<PassengerRouter> router_;
    std::optional<Master> master_;
    std::vector<double> z_lb_;
    std::vector<std::vector<int>> masks_;
    std::mt19937_64 rng_;
    bool lp_failed_ = false;
    Clock::time_point t0_;
    Clock::time_point deadline_;
    std::ofstream trace_;
    std::optional<Candidate> best_;
    SearchResult res_;
};

std::string fmt(double v) {
    if (!std::isfinite(v)) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

SearchResult run_search(const NetworkInstance& inst, const SearchOptions& opt) {
    Searcher s(inst, opt);
    return s.run();
}

std::vector<SearchResult> run_search_many(const NetworkInstance& inst,
                                          const SearchOptions& opt, int runs) {
    runs = std::max(1, runs);
    if (runs == 1) return {run_search(inst, opt)};
    std::vector<std::future<SearchResult>> fs;
    fs.reserve(runs);
    for (int i = 0; i < runs; ++i) {
        SearchOptions o = opt;
        o.seed = opt.seed + static_cast<uint64_t>(i);
        if (!opt.trace_path.empty())
            o.trace_path = opt.trace_path + ".run" + std::to_string(i);
        fs.push_back(std::async(std::launch::async,
                                [&inst, o] { return run_search(inst, o); }));
    }
    std::vector<SearchResult> out;
    out.reserve(runs);
    for (auto& f : fs) out.push_back(f.get());
    return out;
}

std::string summarize_runs_csv(const NetworkInstance& inst,
                               const std::vector<SearchResult>& runs) {
    std::ostringstream os;
    os << "run,seed,method,found,best_pl,best_ptt,ptt_per_pax,pl_root_lb,"
          "root_ptt_bound,ptt_lb,pl_gap,ptt_gap,root_cg_iterations,dives,"
          "outer_iterations,incumbent_updates,columns,lp_rows,separated_rows,"
          "flow_cuts,checker_conflicts,lp_solves,lp_pivots,lp_pivots_max,"
          "wall_s,master_s,pricing_s,separation_s,"
          "routing_s,master_share,pricing_share,separation_share\n";
    double demand = inst.total_demand();
    for (size_t i = 0; i < runs.size(); ++i) {
        const SearchResult& r = runs[i];
        double ptt_lb = std::max(r.ptt_lb, r.root_ptt_bound);
        std::string pl_gap = "", ptt_gap = "";
        if (r.found && r.pl_root_lb > 1e-9)
            pl_gap = fmt((static_cast<double>(r.best_pl) - r.pl_root_lb) / r.pl_root_lb);
        if (r.found && ptt_lb > 1e-9 && std::isfinite(r.best_ptt))
            ptt_gap = fmt((r.best_ptt - ptt_lb) / ptt_lb);
        double wall = std::max(r.wall_seconds, 1e-9);
        os << i << ',' << r.seed << ',' << search_method_name(r.method) << ','
           << (r.found ? 1 : 0) << ',' << r.best_pl << ','
           << (r.found ? fmt(r.best_ptt) : "") << ','
           << (r.found && demand > 0 ? fmt(r.best_ptt / demand) : "") << ','
           << fmt(r.pl_root_lb) << ',' << fmt(r.root_ptt_bound) << ','
           << fmt(r.ptt_lb) << ',' << pl_gap << ',' << ptt_gap << ','
           << r.root_cg_iterations << ',' << r.dives << ',' << r.outer_iterations
           << ',' << r.incumbent_updates << ',' << r.columns << ',' << r.lp_rows
           << ',' << r.separated_rows << ',' << r.flow_cuts << ','
           << r.checker_conflicts << ',' << r.lp_solves << ',' << r.lp_pivots
           << ',' << r.lp_pivots_max << ',' << fmt(r.wall_seconds) << ','
           << fmt(r.t_master) << ',' << fmt(r.t_pricing) << ','
           << fmt(r.t_separation) << ',' << fmt(r.t_routing) << ','
           << fmt(r.t_master / wall) << ',' << fmt(r.t_pricing / wall) << ','
           << fmt(r.t_separation / wall) << '\n';
    }
    return os.str();
}

}  // namespace takt
