#include "takt/instance.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>

namespace takt {

int NetworkInstance::dep_headway(int segment, int station) const {
    int base = segments[segment].dep_headway;
    if (params.hw_network >= 0) base = params.hw_network;
    if (params.hw_hub >= 0 && stations[station].hub) base = params.hw_hub;
    return base;
}

int NetworkInstance::arr_headway(int segment, int station) const {
    int base = segments[segment].arr_headway;
    if (params.hw_network >= 0) base = params.hw_network;
    if (params.hw_hub >= 0 && stations[station].hub) base = params.hw_hub;
    return base;
}

int NetworkInstance::platform_headway(int station) const {
    int h = stations[station].platform_arr_headway;
    if (h >= 0) return h;
    if (params.hw_network >= 0) return params.hw_network;
    return 0;
}

int NetworkInstance::opposite_gap(int segment, int station) const {
    (void)station;
    return segments[segment].opposite_gap;
}

int NetworkInstance::max_dwell(const Line& line, int direction, int position) const {
    if (!line.stops[position]) return 0;
    return line.min_dwell[direction][position - 1] + params.max_extra_dwell;
}

double NetworkInstance::total_demand() const {
    return std::accumulate(od.begin(), od.end(), 0.0,
                           [](double s, const ODEntry& e) { return s + e.demand; });
}

double NetworkInstance::effective_alpha() const {
    if (params.alpha >= 0) return params.alpha;
    double total = total_demand();
    return total > 0 ? 1.0 / total : 0.0;
}

bool NetworkInstance::all_incident_single(int station) const {
    bool any = false;
    for (const auto& seg : segments) {
        if (seg.station_a == station || seg.station_b == station) {
            any = true;
            if (seg.kind != SegmentKind::single_track) return false;
        }
    }
    return any;
}

int NetworkInstance::find_station(const std::string& name) const {
    for (size_t i = 0; i < stations.size(); ++i)
        if (stations[i].name == name) return static_cast<int>(i);
    return -1;
}

int NetworkInstance::find_line(const std::string& name) const {
    for (size_t i = 0; i < lines.size(); ++i)
        if (lines[i].name == name) return static_cast<int>(i);
    return -1;
}

int NetworkInstance::find_segment(int station_a, int station_b) const {
    for (size_t i = 0; i < segments.size(); ++i) {
        const auto& s = segments[i];
        if ((s.station_a == station_a && s.station_b == station_b) ||
            (s.station_a == station_b && s.station_b == station_a))
            return static_cast<int>(i);
    }
    return -1;
}

// Station-level connectivity over line stop patterns, ignoring times.
// Used to flag OD pairs that no sequence of rides could ever serve.
bool od_reachable(const NetworkInstance& inst, int from, int to) {
    int n = static_cast<int>(inst.stations.size());
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    seen[from] = 1;
    q.push(from);
    while (!q.empty()) {
        int s = q.front();
        q.pop();
        if (s == to) return true;
        for (const auto& line : inst.lines) {
            for (int i = 0; i < line.num_stations(); ++i) {
                if (line.stations[i] != s || !line.stops[i]) continue;
                for (int j = 0; j < line.num_stations(); ++j) {
                    if (!line.stops[j] || seen[line.stations[j]]) continue;
                    bool forward = j > i;
                    if (line.rush_hour) {
                        if (line.rush_direction == kOutbound && !forward) continue;
                        if (line.rush_direction == kInbound && forward) continue;
                    }
                    seen[line.stations[j]] = 1;
                    q.push(line.stations[j]);
                }
            }
        }
    }
    return false;
}

ValidationReport validate_instance(const NetworkInstance& inst) {
    ValidationReport rep;
    auto bad = [&rep](const std::string& where, const std::string& what) {
        rep.issues.push_back({where, what});
    };

    const auto& p = inst.params;
    if (p.period < 2) bad("params", "period must be at least 2 instants");
    if (p.kappa < 0) bad("params", "kappa must be non-negative");
    if (p.hw_sibling < 0) bad("params", "sibling headway must be non-negative");
    if (p.min_transfer < 0) bad("params", "min transfer must be non-negative");
    if (p.max_extra_dwell < 0) bad("params", "max extra dwell must be non-negative");

    std::set<std::string> station_names;
    for (size_t i = 0; i < inst.stations.size(); ++i) {
        const auto& st = inst.stations[i];
        if (st.name.empty()) bad("station " + std::to_string(i), "empty name");
        if (!station_names.insert(st.name).second)
            bad("station " + st.name, "duplicate station name");
        if (st.single_platform && !inst.all_incident_single(static_cast<int>(i)))
            bad("station " + st.name,
                "single-platform station must only touch single-track segments");
    }

    int n_stations = static_cast<int>(inst.stations.size());
    for (size_t i = 0; i < inst.segments.size(); ++i) {
        const auto& seg = inst.segments[i];
        std::string where = "segment " + seg.name;
        if (seg.station_a < 0 || seg.station_a >= n_stations ||
            seg.station_b < 0 || seg.station_b >= n_stations)
            bad(where, "endpoint station out of range");
        else if (seg.station_a == seg.station_b)
            bad(where, "segment endpoints coincide");
        if (seg.dep_headway < 0 || seg.arr_headway < 0 || seg.opposite_gap < 0)
            bad(where, "negative headway");
    }

    bool any_f2 = false;
    std::set<std::string> line_names;
    for (size_t li = 0; li < inst.lines.size(); ++li) {
        const auto& line = inst.lines[li];
        std::string where = "line " + line.name;
        if (!line_names.insert(line.name).second) bad(where, "duplicate line name");
        int n = line.num_stations();
        if (n < 2) {
            bad(where, "line must visit at least two stations");
            continue;
        }
        if (static_cast<int>(line.stops.size()) != n)
            bad(where, "stop flags length mismatch");
        else {
            if (!line.stops.front() || !line.stops.back())
                bad(where, "line must stop at both end stations");
        }
        if (static_cast<int>(line.segments.size()) != n - 1)
            bad(where, "segment list length mismatch");
        for (int d = 0; d < 2; ++d) {
            if (static_cast<int>(line.run[d].size()) != n - 1)
                bad(where, "running time array length mismatch");
            else
                for (int v : line.run[d])
                    if (v <= 0) bad(where, "running times must be positive");
            if (static_cast<int>(line.min_dwell[d].size()) != std::max(0, n - 2))
                bad(where, "dwell array length mismatch");
            else
                for (int v : line.min_dwell[d])
                    if (v < 0) bad(where, "negative dwell");
        }
        for (int k = 0; k + 1 < n; ++k) {
            int s = line.stations[k];
            int t = line.stations[k + 1];
            if (s < 0 || s >= n_stations || t < 0 || t >= n_stations) {
                bad(where, "station id out of range");
                continue;
            }
            if (k < static_cast<int>(line.segments.size())) {
                int seg = line.segments[k];
                if (seg < 0 || seg >= static_cast<int>(inst.segments.size()))
                    bad(where, "segment id out of range");
                else {
                    const auto& sg = inst.segments[seg];
                    bool matches = (sg.station_a == s && sg.station_b == t) ||
                                   (sg.station_a == t && sg.station_b == s);
                    if (!matches)
                        bad(where, "segment " + sg.name + " does not connect " +
                                       inst.stations[s].name + " and " +
                                       inst.stations[t].name);
                }
            }
        }
        if (line.frequency != 1 && line.frequency != 2)
            bad(where, "frequency must be 1 or 2");
        if (line.frequency == 2) any_f2 = true;
        if (line.rush_direction != kOutbound && line.rush_direction != kInbound)
            bad(where, "invalid rush direction");
    }

    if (any_f2 && inst.params.period % 2 != 0)
        bad("params", "period must be even when a frequency-2 line exists");

    std::set<std::pair<int, int>> sib_seen;
    for (const auto& [a, b] : inst.siblings) {
        std::string where = "siblings";
        int n_lines = static_cast<int>(inst.lines.size());
        if (a < 0 || a >= n_lines || b < 0 || b >= n_lines) {
            bad(where, "sibling line id out of range");
            continue;
        }
        if (a == b) {
            bad(where, "sibling pair must name two distinct lines");
            continue;
        }
        auto key = std::minmax(a, b);
        if (!sib_seen.insert(key).second)
            bad(where, "duplicate sibling pair");
        const auto& la = inst.lines[a];
        const auto& lb = inst.lines[b];
        bool common = false;
        for (int s : la.stations)
            if (std::find(lb.stations.begin(), lb.stations.end(), s) != lb.stations.end())
                common = true;
        if (!common)
            bad(where, "sibling lines " + la.name + "/" + lb.name +
                           " share no station");
    }

    for (size_t i = 0; i < inst.od.size(); ++i) {
        const auto& e = inst.od[i];
        std::string where = "od " + std::to_string(i);
        if (e.from < 0 || e.from >= n_stations || e.to < 0 || e.to >= n_stations) {
            bad(where, "station id out of range");
            continue;
        }
        if (e.from == e.to) bad(where, "origin equals destination");
        if (e.demand < 0) bad(where, "negative demand");
        if (e.demand > 0 && e.from != e.to && !od_reachable(inst, e.from, e.to))
            bad(where, "no stop pattern connects " + inst.stations[e.from].name +
                           " to " + inst.stations[e.to].name);
    }

    for (int rs : inst.params.representative_stations)
        if (rs < 0 || rs >= n_stations)
            bad("params", "representative station id out of range");

    return rep;
}

}  // namespace takt
