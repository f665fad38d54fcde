#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "takt/instance.hpp"
#include "takt/timetable.hpp"

namespace takt {

// Solver driver: column generation with lazy separation at the root, a
// randomized dive to integrality, and an outer improvement loop that either
// re-dives from scratch or destroys a few lines and repairs around the
// incumbent.  Routing optimality cuts can sharpen the root relaxation.
//
// Determinism: one mt19937_64 seeded from `seed` drives every random choice,
// in a fixed order: first the fixing picks inside each dive, then the
// destroy picks that set up the next dive.  Pricing walks lines in index
// order and the LP uses deterministic pivoting, so equal (instance, options,
// seed) follows the same trajectory whenever the stopping rule is
// wall-clock independent (max_iterations set, or root_only).

enum class SearchMethod {
    lns,           // destroy/repair, accept on perceived travel time
    lns_pl_accept, // destroy/repair, accept on timetable path length
    lns_benders,   // like lns, plus routing cuts at the root
    random_restart // full re-dive every iteration, keep the best
};

const char* search_method_name(SearchMethod m);
std::optional<SearchMethod> parse_search_method(const std::string& s);

struct SearchOptions {
    SearchMethod method = SearchMethod::lns;
    double time_limit = 60.0;  // wall seconds for one run
    uint64_t seed = 1;
    int rho = 5;                   // lines destroyed per iteration (clamped)
    double alpha = -1.0;           // <=0: instance default
    double eps = 1e-4;             // routing capacity floor on unused arcs
    double benders_budget = 0.10;  // fraction of time_limit spent on cuts
    bool lazy_headways = false;
    int multi_price = 1;  // columns per line per pricing round
    bool count_origin_wait = false;
    bool root_only = false;        // stop after the root relaxation
    bool train_graph_mode = false; // per-direction baseline formulation
    // stop after this many dives; 0 = run until the time limit.  A positive
    // value makes the full trajectory independent of wall-clock speed.
    int max_iterations = 0;
    std::string trace_path;        // JSONL event log, empty = off
};

struct SearchResult {
    SearchMethod method = SearchMethod::lns;
    uint64_t seed = 0;
    bool found = false;
    bool proven_infeasible = false;  // dummy stuck at the root
    bool hit_time_limit = false;
    TimetableSolution best;                 // valid when found
    std::vector<std::vector<int>> best_paths;  // per line, graph node ids
    double best_ptt = 0.0;   // demand-weighted total, instants
    long long best_pl = 0;   // timetable path length, instants

    double pl_root_lb = 0.0;     // root LP objective before routing cuts
    double root_objective = 0.0; // root LP objective after routing cuts
    double root_ptt_bound = 0.0; // sum of demand * z at the root
    double ptt_lb = 0.0;         // idealized-network bound
    int root_cg_iterations = 0;  // pricing rounds until the root converged

    int dives = 0;
    int outer_iterations = 0;
    int incumbent_updates = 0;
    int columns = 0;
    int lp_rows = 0;
    int separated_rows = 0;
    int flow_cuts = 0;
    int checker_conflicts = 0;  // across all accepted candidates; expect 0

    long long lp_pivots = 0;   // simplex iterations across every master solve
    int lp_pivots_max = 0;     // worst single master solve
    int lp_solves = 0;

    double wall_seconds = 0.0;
    double t_master = 0.0;
    double t_pricing = 0.0;
    double t_separation = 0.0;
    double t_routing = 0.0;
};

SearchResult run_search(const NetworkInstance& inst, const SearchOptions& opt);

// Independent runs (seed, seed+1, ...) executed concurrently; results in
// seed order.  Each run owns its state, so results match one-at-a-time runs.
std::vector<SearchResult> run_search_many(const NetworkInstance& inst,
                                          const SearchOptions& opt, int runs);

// Per-direction baseline: every two-direction line becomes two independent
// one-direction lines (frequency 1 only).  The coupling between the two
// directions of a line is then enforced by lazily separated packing rows
// instead of the node structure.  Returns the rewritten instance and the
// (outbound, inbound) split-line index pairs.
struct DirectionSplit {
    NetworkInstance inst;
    std::vector<std::pair<int, int>> pairs;
};
DirectionSplit split_directions(const NetworkInstance& inst);

// One summary line per run in CSV form, with a header. Gaps are relative to
// the corresponding lower bounds.
std::string summarize_runs_csv(const NetworkInstance& inst,
                               const std::vector<SearchResult>& runs);

}  // namespace takt
