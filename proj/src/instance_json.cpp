#include "takt/instance_json.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace takt {

using nlohmann::json;
using nlohmann::ordered_json;

int minutes_to_instants(double minutes) {
    double scaled = minutes * 2.0;
    double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > 1e-6)
        throw instance_format_error("time " + std::to_string(minutes) +
                                    " min is not on the half-minute grid");
    return static_cast<int>(rounded);
}

double instants_to_minutes(int instants) { return instants / 2.0; }

namespace {

int opt_instants(const json& obj, const std::string& key, int fallback) {
    if (!obj.contains(key) || obj[key].is_null()) return fallback;
    return minutes_to_instants(obj[key].get<double>());
}

SegmentKind parse_kind(const std::string& s) {
    if (s == "single") return SegmentKind::single_track;
    if (s == "double") return SegmentKind::double_track;
    if (s == "quadruple") return SegmentKind::quadruple_track;
    throw instance_format_error("unknown segment kind '" + s + "'");
}

std::string kind_name(SegmentKind k) {
    switch (k) {
        case SegmentKind::single_track: return "single";
        case SegmentKind::double_track: return "double";
        case SegmentKind::quadruple_track: return "quadruple";
    }
    return "double";
}

std::vector<int> parse_instant_array(const json& arr) {
    std::vector<int> out;
    for (const auto& v : arr) out.push_back(minutes_to_instants(v.get<double>()));
    return out;
}

}  // namespace

NetworkInstance parse_instance(const std::string& json_text) {
    json root = json::parse(json_text);
    NetworkInstance inst;

    for (const auto& js : root.at("stations")) {
        Station st;
        st.name = js.at("id").get<std::string>();
        st.hub = js.value("hub", false);
        st.single_platform = js.value("single_platform", false);
        st.platform_arr_headway = opt_instants(js, "opposite_arr_headway_min", -1);
        inst.stations.push_back(std::move(st));
    }
    auto station_id = [&inst](const std::string& name) {
        int id = inst.find_station(name);
        if (id < 0) throw instance_format_error("unknown station '" + name + "'");
        return id;
    };

    for (const auto& js : root.at("segments")) {
        TrackSegment seg;
        seg.name = js.at("id").get<std::string>();
        seg.station_a = station_id(js.at("from").get<std::string>());
        seg.station_b = station_id(js.at("to").get<std::string>());
        seg.kind = parse_kind(js.value("kind", std::string("double")));
        seg.dep_headway = opt_instants(js, "dep_headway_min", 0);
        seg.arr_headway = opt_instants(js, "arr_headway_min", 0);
        seg.opposite_gap = opt_instants(js, "opposite_gap_min", 0);
        inst.segments.push_back(std::move(seg));
    }

    for (const auto& jl : root.at("lines")) {
        Line line;
        line.name = jl.at("id").get<std::string>();
        for (const auto& s : jl.at("stations"))
            line.stations.push_back(station_id(s.get<std::string>()));
        if (jl.contains("stops"))
            for (const auto& b : jl.at("stops"))
                line.stops.push_back(b.get<bool>() ? 1 : 0);
        else
            line.stops.assign(line.stations.size(), 1);
        for (size_t k = 0; k + 1 < line.stations.size(); ++k) {
            int seg = inst.find_segment(line.stations[k], line.stations[k + 1]);
            if (seg < 0)
                throw instance_format_error(
                    "line " + line.name + ": no segment between consecutive stations " +
                    inst.stations[line.stations[k]].name + " and " +
                    inst.stations[line.stations[k + 1]].name);
            line.segments.push_back(seg);
        }
        const auto& jr = jl.at("run_min");
        line.run[kOutbound] = parse_instant_array(jr.at("outbound"));
        line.run[kInbound] = parse_instant_array(jr.at("inbound"));
        if (jl.contains("dwell_min")) {
            const auto& jd = jl.at("dwell_min");
            line.min_dwell[kOutbound] = parse_instant_array(jd.at("outbound"));
            line.min_dwell[kInbound] = parse_instant_array(jd.at("inbound"));
        } else {
            size_t inner = line.stations.size() >= 2 ? line.stations.size() - 2 : 0;
            line.min_dwell[kOutbound].assign(inner, 0);
            line.min_dwell[kInbound].assign(inner, 0);
        }
        line.frequency = jl.value("frequency", 1);
        line.rush_hour = jl.value("rush_hour", false);
        std::string rd = jl.value("rush_direction", std::string("outbound"));
        if (rd != "outbound" && rd != "inbound")
            throw instance_format_error("line " + line.name +
                                        ": rush_direction must be outbound or inbound");
        line.rush_direction = rd == "outbound" ? kOutbound : kInbound;
        inst.lines.push_back(std::move(line));
    }
    auto line_id = [&inst](const std::string& name) {
        int id = inst.find_line(name);
        if (id < 0) throw instance_format_error("unknown line '" + name + "'");
        return id;
    };

    if (root.contains("siblings"))
        for (const auto& jp : root.at("siblings")) {
            const auto& pair = jp.at("lines");
            inst.siblings.emplace_back(line_id(pair.at(0).get<std::string>()),
                                       line_id(pair.at(1).get<std::string>()));
        }

    if (root.contains("od"))
        for (const auto& je : root.at("od")) {
            ODEntry e;
            e.from = station_id(je.at("from").get<std::string>());
            e.to = station_id(je.at("to").get<std::string>());
            e.demand = je.at("per_hour").get<double>();
            inst.od.push_back(e);
        }

    const auto& jp = root.at("params");
    inst.params.period = minutes_to_instants(jp.at("period_min").get<double>());
    inst.params.kappa = opt_instants(jp, "kappa_min", 3);
    inst.params.hw_hub = opt_instants(jp, "hw_hub_min", -1);
    inst.params.hw_network = opt_instants(jp, "hw_network_min", -1);
    inst.params.hw_sibling = opt_instants(jp, "hw_sibling_min", 30);
    inst.params.min_transfer = opt_instants(jp, "min_transfer_min", 10);
    inst.params.max_extra_dwell = opt_instants(jp, "max_extra_dwell_min", 6);
    if (jp.contains("alpha") && !jp["alpha"].is_null())
        inst.params.alpha = jp["alpha"].get<double>();
    if (jp.contains("representative_stations"))
        for (const auto& s : jp.at("representative_stations"))
            inst.params.representative_stations.push_back(
                station_id(s.get<std::string>()));

    return inst;
}

NetworkInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw instance_format_error("cannot open instance file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_instance(ss.str());
}

std::string instance_to_json(const NetworkInstance& inst) {
    ordered_json root;

    root["stations"] = ordered_json::array();
    for (const auto& st : inst.stations) {
        ordered_json js;
        js["id"] = st.name;
        if (st.hub) js["hub"] = true;
        if (st.single_platform) js["single_platform"] = true;
        if (st.platform_arr_headway >= 0)
            js["opposite_arr_headway_min"] = instants_to_minutes(st.platform_arr_headway);
        root["stations"].push_back(js);
    }

    root["segments"] = ordered_json::array();
    for (const auto& seg : inst.segments) {
        ordered_json js;
        js["id"] = seg.name;
        js["from"] = inst.stations[seg.station_a].name;
        js["to"] = inst.stations[seg.station_b].name;
        js["kind"] = kind_name(seg.kind);
        js["dep_headway_min"] = instants_to_minutes(seg.dep_headway);
        js["arr_headway_min"] = instants_to_minutes(seg.arr_headway);
        if (seg.opposite_gap > 0)
            js["opposite_gap_min"] = instants_to_minutes(seg.opposite_gap);
        root["segments"].push_back(js);
    }

    auto minute_array = [](const std::vector<int>& v) {
        ordered_json arr = ordered_json::array();
        for (int x : v) arr.push_back(instants_to_minutes(x));
        return arr;
    };

    root["lines"] = ordered_json::array();
    for (const auto& line : inst.lines) {
        ordered_json jl;
        jl["id"] = line.name;
        jl["stations"] = ordered_json::array();
        for (int s : line.stations) jl["stations"].push_back(inst.stations[s].name);
        jl["stops"] = ordered_json::array();
        for (uint8_t b : line.stops) jl["stops"].push_back(b != 0);
        jl["run_min"]["outbound"] = minute_array(line.run[kOutbound]);
        jl["run_min"]["inbound"] = minute_array(line.run[kInbound]);
        jl["dwell_min"]["outbound"] = minute_array(line.min_dwell[kOutbound]);
        jl["dwell_min"]["inbound"] = minute_array(line.min_dwell[kInbound]);
        jl["frequency"] = line.frequency;
        if (line.rush_hour) {
            jl["rush_hour"] = true;
            jl["rush_direction"] =
                line.rush_direction == kOutbound ? "outbound" : "inbound";
        }
        root["lines"].push_back(jl);
    }

    root["siblings"] = ordered_json::array();
    for (const auto& [a, b] : inst.siblings) {
        ordered_json jp;
        jp["lines"] = {inst.lines[a].name, inst.lines[b].name};
        root["siblings"].push_back(jp);
    }

    root["od"] = ordered_json::array();
    for (const auto& e : inst.od) {
        ordered_json je;
        je["from"] = inst.stations[e.from].name;
        je["to"] = inst.stations[e.to].name;
        je["per_hour"] = e.demand;
        root["od"].push_back(je);
    }

    ordered_json jp;
    jp["period_min"] = instants_to_minutes(inst.params.period);
    jp["kappa_min"] = instants_to_minutes(inst.params.kappa);
    if (inst.params.hw_hub >= 0)
        jp["hw_hub_min"] = instants_to_minutes(inst.params.hw_hub);
    if (inst.params.hw_network >= 0)
        jp["hw_network_min"] = instants_to_minutes(inst.params.hw_network);
    jp["hw_sibling_min"] = instants_to_minutes(inst.params.hw_sibling);
    jp["min_transfer_min"] = instants_to_minutes(inst.params.min_transfer);
    jp["max_extra_dwell_min"] = instants_to_minutes(inst.params.max_extra_dwell);
    if (inst.params.alpha >= 0) jp["alpha"] = inst.params.alpha;
    if (!inst.params.representative_stations.empty()) {
        jp["representative_stations"] = ordered_json::array();
        for (int s : inst.params.representative_stations)
            jp["representative_stations"].push_back(inst.stations[s].name);
    }
    root["params"] = jp;

    return root.dump(2) + "\n";
}

void save_instance(const NetworkInstance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw instance_format_error("cannot write instance file " + path);
    out << instance_to_json(inst);
}

}  // namespace takt
