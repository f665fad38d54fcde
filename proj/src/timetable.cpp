#include "takt/timetable.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "takt/instance_json.hpp"

namespace takt {

std::vector<TrackEvent> train_events(const Line& line, const TrainPath& train) {
    std::vector<TrackEvent> out;
    int n = static_cast<int>(train.visits.size());
    for (int v = 0; v < n; ++v) {
        const auto& st = train.visits[v];
        if (v > 0) {
            int seg = line.segments[hop_segment_position(line, train.direction, v - 1)];
            out.push_back({st.station, seg, train.parallel[v - 1], EventKind::arrival,
                           st.arr, train.line, train.direction, train.dup});
        }
        if (v + 1 < n) {
            int seg = line.segments[hop_segment_position(line, train.direction, v)];
            out.push_back({st.station, seg, train.parallel[v], EventKind::departure,
                           st.dep, train.line, train.direction, train.dup});
        }
    }
    return out;
}

std::string timetable_to_json(const NetworkInstance& inst, const TimetableSolution& sol) {
    nlohmann::ordered_json root;
    root["feasible"] = sol.feasible;
    root["path_length_min"] = instants_to_minutes(static_cast<int>(sol.path_length));
    root["ptt"] = sol.ptt;
    root["trains"] = nlohmann::ordered_json::array();
    for (const auto& tr : sol.trains) {
        nlohmann::ordered_json jt;
        jt["line"] = inst.lines[tr.line].name;
        jt["direction"] = tr.direction == kOutbound ? "outbound" : "inbound";
        jt["dup"] = tr.dup;
        jt["visits"] = nlohmann::ordered_json::array();
        for (const auto& v : tr.visits) {
            nlohmann::ordered_json jv;
            jv["station"] = inst.stations[v.station].name;
            jv["arr_min"] = instants_to_minutes(v.arr);
            jv["dep_min"] = instants_to_minutes(v.dep);
            jt["visits"].push_back(jv);
        }
        jt["tracks"] = tr.parallel;
        root["trains"].push_back(jt);
    }
    return root.dump(2) + "\n";
}

TimetableSolution timetable_from_json(const NetworkInstance& inst, const std::string& text) {
    auto root = nlohmann::json::parse(text);
    TimetableSolution sol;
    sol.feasible = root.value("feasible", true);
    sol.ptt = root.value("ptt", 0.0);
    for (const auto& jt : root.at("trains")) {
        TrainPath tr;
        tr.line = inst.find_line(jt.at("line").get<std::string>());
        if (tr.line < 0)
            throw instance_format_error("timetable references unknown line " +
                                        jt.at("line").get<std::string>());
        tr.direction =
            jt.at("direction").get<std::string>() == "outbound" ? kOutbound : kInbound;
        tr.dup = jt.value("dup", 0);
        for (const auto& jv : jt.at("visits")) {
            StationTime st;
            st.station = inst.find_station(jv.at("station").get<std::string>());
            if (st.station < 0)
                throw instance_format_error("timetable references unknown station " +
                                            jv.at("station").get<std::string>());
            st.arr = minutes_to_instants(jv.at("arr_min").get<double>());
            st.dep = minutes_to_instants(jv.at("dep_min").get<double>());
            tr.visits.push_back(st);
        }
        if (jt.contains("tracks"))
            tr.parallel = jt.at("tracks").get<std::vector<int>>();
        else
            tr.parallel.assign(tr.visits.empty() ? 0 : tr.visits.size() - 1, 0);
        // Unrolled duration: hop and dwell deltas accumulated around the cycle.
        int T = inst.params.period;
        int dur = 0;
        for (size_t v = 0; v + 1 < tr.visits.size(); ++v) {
            dur += cyc_delta(tr.visits[v].arr, tr.visits[v].dep, T);
            dur += cyc_delta(tr.visits[v].dep, tr.visits[v + 1].arr, T);
        }
        tr.duration = dur;
        sol.trains.push_back(std::move(tr));
    }
    long long pl = 0;
    for (const auto& tr : sol.trains) pl += tr.duration;
    sol.path_length = pl;
    return sol;
}

void save_timetable(const NetworkInstance& inst, const TimetableSolution& sol,
                    const std::string& path) {
    std::ofstream out(path);
    if (!out) throw instance_format_error("cannot write timetable file " + path);
    out << timetable_to_json(inst, sol);
}

TimetableSolution load_timetable(const NetworkInstance& inst, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw instance_format_error("cannot open timetable file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return timetable_from_json(inst, ss.str());
}

}  // namespace takt
