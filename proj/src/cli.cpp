#include "takt/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "takt/conflicts.hpp"
#include "takt/instance_json.hpp"
#include "takt/passenger.hpp"
#include "takt/report.hpp"
#include "takt/search.hpp"
#include "takt/synth.hpp"
#include "takt/timetable.hpp"

namespace takt {

namespace {

bool verbose() {
    const char* v = std::getenv("TT_LOG");
    return v && *v;
}

void log_line(const std::string& s) {
    if (verbose()) std::cerr << "[taktplan] " << s << "\n";
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
}

NetworkInstance load_or_synth(const std::string& instance_path,
                              const std::string& preset, uint64_t seed) {
    if (!instance_path.empty()) {
        log_line("loading instance " + instance_path);
        return load_instance(instance_path);
    }
    SynthSpec spec = synth_preset(preset.empty() ? "medium" : preset);
    spec.seed = seed;
    log_line("generating preset " + (preset.empty() ? "medium" : preset) +
             " with seed " + std::to_string(seed));
    return synth_instance(spec);
}

int require_valid(const NetworkInstance& inst) {
    ValidationReport rep = validate_instance(inst);
    if (rep.ok()) return 0;
    for (const auto& i : rep.issues)
        std::cerr << "invalid instance: " << i.where << ": " << i.what << "\n";
    return 2;
}

int cmd_generate(const std::string& preset, uint64_t seed, int lines, int od_pairs,
                 double alpha, bool representative, const std::string& out) {
    SynthSpec spec = synth_preset(preset);
    spec.seed = seed;
    if (lines > 0) spec.lines = lines;
    if (od_pairs > 0) spec.od_pairs = od_pairs;
    spec.alpha = alpha;
    spec.representative = representative;
    NetworkInstance inst = synth_instance(spec);
    save_instance(inst, out);
    std::cout << "wrote " << out << ": " << inst.stations.size() << " stations, "
              << inst.segments.size() << " segments, " << inst.lines.size()
              << " lines, " << inst.od.size() << " commodities\n";
    return 0;
}

int cmd_validate(const std::string& path) {
    NetworkInstance inst = load_instance(path);
    ValidationReport rep = validate_instance(inst);
    if (rep.ok()) {
        std::cout << "ok: " << inst.stations.size() << " stations, "
                  << inst.lines.size() << " lines, " << inst.od.size()
                  << " commodities\n";
        return 0;
    }
    for (const auto& i : rep.issues)
        std::cout << i.where << ": " << i.what << "\n";
    return 2;
}

int pick_best_run(const std::vector<SearchResult>& runs, SearchMethod method) {
    int best = -1;
    for (size_t i = 0; i < runs.size(); ++i) {
        if (!runs[i].found) continue;
        if (best < 0) {
            best = static_cast<int>(i);
            continue;
        }
        bool better = method == SearchMethod::lns_pl_accept
                          ? runs[i].best_pl < runs[best].best_pl
                          : runs[i].best_ptt < runs[best].best_ptt;
        if (better) best = static_cast<int>(i);
    }
    return best;
}

int cmd_solve(const NetworkInstance& inst, SearchOptions opt, int runs,
              const std::string& prefix) {
    if (int rc = require_valid(inst)) return rc;
    if (opt.trace_path.empty()) opt.trace_path = prefix + ".trace.jsonl";
    std::vector<SearchResult> results = run_search_many(inst, opt, runs);
    write_file(prefix + ".summary.csv", summarize_runs_csv(inst, results));

    double demand = inst.total_demand();
    for (size_t i = 0; i < results.size(); ++i) {
        const SearchResult& r = results[i];
        std::ostringstream os;
        os << "run " << i << " seed " << r.seed << ": ";
        if (r.proven_infeasible)
            os << "infeasible";
        else if (!r.found)
            os << (opt.root_only ? "root only" : "no timetable");
        else
            os << "pl " << r.best_pl << " ptt/pax "
               << (demand > 0 ? r.best_ptt / demand / 2.0 : 0.0) << " min";
        os << " | root pl lb " << r.pl_root_lb / 1.0 << ", ptt lb "
           << r.ptt_lb << ", cg iters " << r.root_cg_iterations << ", dives "
           << r.dives << ", cols " << r.columns << ", rows " << r.lp_rows
           << ", cuts " << r.flow_cuts << ", wall " << r.wall_seconds << "s";
        std::cout << os.str() << "\n";
    }

    bool all_infeasible = true;
    for (const auto& r : results) all_infeasible &= r.proven_infeasible;
    if (all_infeasible) {
        std::cout << "instance is infeasible\n";
        return 2;
    }
    if (opt.root_only) {
        std::cout << "root relaxation done; summary in " << prefix
                  << ".summary.csv\n";
        return 0;
    }
    int best = pick_best_run(results, opt.method);
    if (best < 0) {
        std::cout << "no feasible timetable found within the limits\n";
        return 2;
    }
    const SearchResult& r = results[best];
    NetworkInstance work = inst;
    if (opt.train_graph_mode) work = split_directions(inst).inst;
    save_timetable(work, r.best, prefix + ".timetable.json");
    std::cout << "best run " << best << ": path length " << r.best_pl
              << " instants, perceived time "
              << (demand > 0 ? r.best_ptt / demand / 2.0 : 0.0)
              << " min/passenger; wrote " << prefix << ".timetable.json\n";
    return 0;
}

int cmd_route(const std::string& instance_path, const std::string& timetable_path,
              const std::string& out, bool count_origin_wait) {
    NetworkInstance inst = load_instance(instance_path);
    if (int rc = require_valid(inst)) return rc;
    TimetableSolution sol = load_timetable(inst, timetable_path);
    PassengerRouter router(inst, RoutingOptions{count_origin_wait, 1e-4});
    std::vector<double> per_commodity;
    std::vector<CommodityRoute> routes;
    double total = router.route_integral(sol, &per_commodity, &routes);
    double demand = inst.total_demand();
    if (!std::isfinite(total)) {
        std::cout << "some commodities are unreachable on this timetable\n";
    } else {
        std::cout << "perceived travel time: total " << total << " instants, "
                  << (demand > 0 ? total / demand / 2.0 : 0.0)
                  << " min per passenger\n";
    }
    if (!out.empty()) {
        write_file(out, transfer_csv(inst, per_commodity, routes));
        std::cout << "wrote " << out << "\n";
    }
    return 0;
}

int cmd_report(const std::string& instance_path, const std::string& timetable_path,
               const std::string& corridor_arg, const std::string& out) {
    NetworkInstance inst = load_instance(instance_path);
    if (int rc = require_valid(inst)) return rc;
    TimetableSolution sol = load_timetable(inst, timetable_path);
    std::vector<int> corridor;
    if (!corridor_arg.empty()) {
        std::stringstream ss(corridor_arg);
        std::string name;
        while (std::getline(ss, name, ',')) {
            int id = inst.find_station(name);
            if (id < 0) throw std::runtime_error("unknown station: " + name);
            corridor.push_back(id);
        }
    } else {
        corridor = default_corridor(inst);
    }
    if (corridor.size() < 2) throw std::runtime_error("corridor needs 2+ stations");
    write_file(out, corridor_svg(inst, sol, corridor));
    std::cout << "wrote " << out << "\n";
    return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"periodic timetable construction and evaluation"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "write a synthetic instance");
    std::string g_preset = "medium", g_out = "instance.json";
    uint64_t g_seed = 1;
    int g_lines = 0, g_od = 0;
    double g_alpha = -1.0;
    bool g_repr = false;
    gen->add_option("--preset", g_preset, "tiny | small | medium");
    gen->add_option("--seed", g_seed, "generator seed");
    gen->add_option("--lines", g_lines, "override line count");
    gen->add_option("--od-pairs", g_od, "override commodity count");
    gen->add_option("--alpha", g_alpha, "travel-time weight (-1 = 1/demand)");
    gen->add_flag("--representative", g_repr, "restrict routing cuts to hub+tips");
    gen->add_option("--out", g_out, "output instance file")->required();

    // validate
    auto* val = app.add_subcommand("validate", "check an instance file");
    std::string v_path;
    val->add_option("instance", v_path, "instance file")->required();

    // solve
    auto* sol = app.add_subcommand("solve", "build a timetable");
    std::string s_instance, s_preset, s_prefix = "run", s_method = "lns";
    std::string s_trace;
    SearchOptions sopt;
    int s_runs = 1;
    uint64_t s_synth_seed = 1;
    sol->add_option("--instance", s_instance, "instance file");
    sol->add_option("--preset", s_preset, "synthesize instead of loading");
    sol->add_option("--synth-seed", s_synth_seed, "seed for --preset");
    sol->add_option("--out", s_prefix, "output prefix");
    sol->add_option("--method", s_method, "lns | lns-benders | lns-pl-accept | random")
        ->check(CLI::IsMember({"lns", "lns-benders", "lns-pl-accept", "random"}));
    sol->add_option("--time-limit", sopt.time_limit, "wall seconds per run");
    sol->add_option("--seed", sopt.seed, "search seed");
    sol->add_option("--rho", sopt.rho, "lines destroyed per iteration");
    sol->add_option("--alpha", sopt.alpha, "travel-time weight (<=0: instance)");
    sol->add_option("--epsilon", sopt.eps, "capacity floor on unused ride arcs");
    sol->add_option("--benders-budget", sopt.benders_budget,
                    "fraction of the time limit spent on routing cuts");
    sol->add_flag("--lazy-headways", sopt.lazy_headways,
                  "separate pooled headway rows lazily");
    sol->add_option("--multi-price", sopt.multi_price, "columns per line per round");
    sol->add_flag("--count-origin-wait", sopt.count_origin_wait,
                  "charge waiting at the origin station");
    sol->add_option("--iterations", sopt.max_iterations,
                    "stop after this many dives (0 = time limit)");
    sol->add_flag("--root-only", sopt.root_only, "stop after the root relaxation");
    sol->add_flag("--train-graph-mode", sopt.train_graph_mode,
                  "per-direction baseline formulation");
    sol->add_option("--runs", s_runs, "independent runs (seed, seed+1, ...)");
    sol->add_option("--trace", s_trace, "trace path (default <prefix>.trace.jsonl)");

    // route
    auto* rt = app.add_subcommand("route", "route passengers on a timetable");
    std::string r_instance, r_timetable, r_out;
    bool r_wait = false;
    rt->add_option("--instance", r_instance, "instance file")->required();
    rt->add_option("--timetable", r_timetable, "timetable file")->required();
    rt->add_option("--out", r_out, "transfer CSV path");
    rt->add_flag("--count-origin-wait", r_wait, "charge waiting at the origin");

    // report
    auto* rp = app.add_subcommand("report", "draw a distance-time diagram");
    std::string p_instance, p_timetable, p_out = "diagram.svg", p_corridor;
    rp->add_option("--instance", p_instance, "instance file")->required();
    rp->add_option("--timetable", p_timetable, "timetable file")->required();
    rp->add_option("--corridor", p_corridor, "comma-separated station names");
    rp->add_option("--out", p_out, "output SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (gen->parsed())
            return cmd_generate(g_preset, g_seed, g_lines, g_od, g_alpha, g_repr,
                                g_out);
        if (val->parsed()) return cmd_validate(v_path);
        if (sol->parsed()) {
            sopt.method = *parse_search_method(s_method);
            sopt.trace_path = s_trace;
            NetworkInstance inst =
                load_or_synth(s_instance, s_preset, s_synth_seed);
            return cmd_solve(inst, sopt, s_runs, s_prefix);
        }
        if (rt->parsed()) return cmd_route(r_instance, r_timetable, r_out, r_wait);
        if (rp->parsed())
            return cmd_report(p_instance, p_timetable, p_corridor, p_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

}  // namespace takt
