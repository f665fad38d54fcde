#include "takt/conflicts.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <json.hpp>

namespace takt {

namespace {

struct Hop {
    int train = -1;      // index into sol.trains
    int segment = -1;
    int from = -1;       // station ids
    int to = -1;
    int dep = 0;
    int arr = 0;
    int parallel = 0;
    int line = -1;
    int direction = 0;
    int dup = 0;
};

// Open cyclic intervals (a, a+la) and (b, b+lb) intersect?
bool open_intervals_overlap(int a, int la, int b, int lb, int T) {
    if (la <= 0 || lb <= 0) return false;
    return cyc_delta(a, b, T) < la || cyc_delta(b, a, T) < lb;
}

std::string tname(const NetworkInstance& inst, const TrainPath& tr) {
    std::ostringstream os;
    os << inst.lines[tr.line].name << (tr.direction == kOutbound ? ">" : "<")
       << "#" << tr.dup;
    return os.str();
}

}  // namespace

std::string conflict_type_name(ConflictType t) {
    switch (t) {
        case ConflictType::structure: return "structure";
        case ConflictType::running_time: return "running_time";
        case ConflictType::dwell: return "dwell";
        case ConflictType::symmetry: return "symmetry";
        case ConflictType::frequency_shift: return "frequency_shift";
        case ConflictType::track_choice: return "track_choice";
        case ConflictType::dep_headway: return "dep_headway";
        case ConflictType::arr_headway: return "arr_headway";
        case ConflictType::platform_headway: return "platform_headway";
        case ConflictType::crossing: return "crossing";
        case ConflictType::overtaking: return "overtaking";
        case ConflictType::sibling_spread: return "sibling_spread";
    }
    return "unknown";
}

ConflictReport check_timetable(const NetworkInstance& inst, const TimetableSolution& sol) {
    ConflictReport rep;
    const int T = inst.params.period;
    auto add = [&rep](ConflictType type, const std::string& desc, int a, int b) {
        rep.conflicts.push_back({type, desc, a, b});
    };

    // Per-train structural checks.
    for (size_t ti = 0; ti < sol.trains.size(); ++ti) {
        const auto& tr = sol.trains[ti];
        if (tr.line < 0 || tr.line >= static_cast<int>(inst.lines.size())) {
            add(ConflictType::structure, "train references unknown line",
                static_cast<int>(ti), -1);
            continue;
        }
        const auto& line = inst.lines[tr.line];
        int n = line.num_stations();
        std::string name = tname(inst, tr);
        if (static_cast<int>(tr.visits.size()) != n ||
            static_cast<int>(tr.parallel.size()) != n - 1) {
            add(ConflictType::structure, name + ": visit/track count mismatch",
                static_cast<int>(ti), -1);
            continue;
        }
        if (line.rush_hour && tr.direction != line.rush_direction)
            add(ConflictType::structure, name + ": rush-hour line scheduled against its direction",
                static_cast<int>(ti), -1);
        bool order_ok = true;
        for (int v = 0; v < n; ++v)
            if (tr.visits[v].station != line.stations[line_position(line, tr.direction, v)])
                order_ok = false;
        if (!order_ok) {
            add(ConflictType::structure, name + ": stations out of order",
                static_cast<int>(ti), -1);
            continue;
        }
        for (int v = 0; v + 1 < n; ++v) {
            int seg_pos = hop_segment_position(line, tr.direction, v);
            int run = line.run[tr.direction][seg_pos];
            int actual = cyc_delta(tr.visits[v].dep, tr.visits[v + 1].arr, T);
            if (actual != run) {
                std::ostringstream os;
                os << name << ": hop " << inst.stations[tr.visits[v].station].name
                   << "->" << inst.stations[tr.visits[v + 1].station].name
                   << " takes " << actual << " instants, line says " << run;
                add(ConflictType::running_time, os.str(), static_cast<int>(ti), -1);
            }
            int seg = line.segments[seg_pos];
            if (tr.parallel[v] < 0 ||
                tr.parallel[v] >= inst.segments[seg].parallel_tracks_per_direction())
                add(ConflictType::track_choice, name + ": track index out of range",
                    static_cast<int>(ti), -1);
            // Same physical track along a chain of consecutive quadruple segments.
            if (v > 0) {
                int prev_seg = line.segments[hop_segment_position(line, tr.direction, v - 1)];
                if (inst.segments[seg].kind == SegmentKind::quadruple_track &&
                    inst.segments[prev_seg].kind == SegmentKind::quadruple_track &&
                    tr.parallel[v] != tr.parallel[v - 1])
                    add(ConflictType::track_choice,
                        name + ": track choice changes inside a quadruple chain",
                        static_cast<int>(ti), -1);
            }
        }
        for (int v = 0; v < n; ++v) {
            int pos = line_position(line, tr.direction, v);
            int dwell = cyc_delta(tr.visits[v].arr, tr.visits[v].dep, T);
            if (v == 0 || v == n - 1) {
                if (dwell != 0)
                    add(ConflictType::structure, name + ": endpoint arr/dep differ",
                        static_cast<int>(ti), -1);
                continue;
            }
            if (!line.stops[pos]) {
                if (dwell != 0)
                    add(ConflictType::dwell, name + ": dwell at pass-through station " +
                                                 inst.stations[tr.visits[v].station].name,
                        static_cast<int>(ti), -1);
                continue;
            }
            int lo = line.min_dwell[tr.direction][pos - 1];
            int hi = inst.max_dwell(line, tr.direction, pos);
            if (dwell < lo || dwell > hi) {
                std::ostringstream os;
                os << name << ": dwell " << dwell << " at "
                   << inst.stations[tr.visits[v].station].name << " outside [" << lo
                   << ", " << hi << "]";
                add(ConflictType::dwell, os.str(), static_cast<int>(ti), -1);
            }
        }
    }

    // Group trains per line for symmetry / frequency / track-agreement checks.
    std::map<std::tuple<int, int, int>, int> by_key;  // (line, dir, dup) -> train
    for (size_t ti = 0; ti < sol.trains.size(); ++ti) {
        const auto& tr = sol.trains[ti];
        auto key = std::make_tuple(tr.line, tr.direction, tr.dup);
        if (by_key.count(key))
            add(ConflictType::structure,
                tname(inst, tr) + ": duplicate train for the same line slot",
                static_cast<int>(ti), by_key[key]);
        else
            by_key[key] = static_cast<int>(ti);
    }
    auto find_train = [&by_key](int line, int dir, int dup) {
        auto it = by_key.find(std::make_tuple(line, dir, dup));
        return it == by_key.end() ? -1 : it->second;
    };

    for (size_t li = 0; li < inst.lines.size(); ++li) {
        const auto& line = inst.lines[li];
        int n = line.num_stations();
        for (int dup = 0; dup < line.frequency; ++dup) {
            int ta = find_train(static_cast<int>(li), kOutbound, dup);
            int tb = find_train(static_cast<int>(li), kInbound, dup);
            if (!line.rush_hour && ta >= 0 && tb >= 0) {
                const auto& out = sol.trains[ta];
                const auto& in = sol.trains[tb];
                if (static_cast<int>(out.visits.size()) == n &&
                    static_cast<int>(in.visits.size()) == n) {
                    for (int pos = 0; pos < n; ++pos) {
                        // in-train visit index for line position pos
                        int vi = n - 1 - pos;
                        auto check_sum = [&](int dep, int arr, const char* what) {
                            int r = pmod(dep + arr, T);
                            if (r > inst.params.kappa && r < T - inst.params.kappa) {
                                std::ostringstream os;
                                os << "line " << line.name << " dup " << dup << ": "
                                   << what << " at " << inst.stations[line.stations[pos]].name
                                   << " breaks symmetry (sum offset " << r << ")";
                                add(ConflictType::symmetry, os.str(), ta, tb);
                            }
                        };
                        if (pos < n - 1)
                            check_sum(out.visits[pos].dep, in.visits[vi].arr,
                                      "outbound dep + inbound arr");
                        if (pos > 0)
                            check_sum(in.visits[vi].dep, out.visits[pos].arr,
                                      "inbound dep + outbound arr");
                    }
                    for (int h = 0; h < n - 1; ++h)
                        if (out.parallel[h] != in.parallel[n - 2 - h])
                            add(ConflictType::track_choice,
                                "line " + line.name + ": directions disagree on track choice",
                                ta, tb);
                }
            }
            if (dup == 1) {
                for (int dir = 0; dir < 2; ++dir) {
                    int t0 = find_train(static_cast<int>(li), dir, 0);
                    int t1 = find_train(static_cast<int>(li), dir, 1);
                    if (t0 < 0 || t1 < 0) continue;
                    const auto& a = sol.trains[t0];
                    const auto& b = sol.trains[t1];
                    if (a.visits.size() != b.visits.size()) continue;
                    for (size_t v = 0; v < a.visits.size(); ++v) {
                        if (cyc_delta(a.visits[v].arr, b.visits[v].arr, T) != T / 2 ||
                            cyc_delta(a.visits[v].dep, b.visits[v].dep, T) != T / 2) {
                            add(ConflictType::frequency_shift,
                                "line " + line.name + ": second pair not offset by T/2",
                                t0, t1);
                            break;
                        }
                    }
                    for (size_t h = 0; h < a.parallel.size(); ++h)
                        if (a.parallel[h] != b.parallel[h])
                            add(ConflictType::track_choice,
                                "line " + line.name + ": train pairs disagree on track choice",
                                t0, t1);
                }
            }
        }
    }

    // Event and hop tables for pairwise rules.
    std::vector<TrackEvent> events;
    std::vector<int> event_train;
    std::vector<Hop> hops;
    for (size_t ti = 0; ti < sol.trains.size(); ++ti) {
        const auto& tr = sol.trains[ti];
        if (tr.line < 0) continue;
        const auto& line = inst.lines[tr.line];
        if (static_cast<int>(tr.visits.size()) != line.num_stations()) continue;
        for (auto& ev : train_events(line, tr)) {
            events.push_back(ev);
            event_train.push_back(static_cast<int>(ti));
        }
        for (size_t v = 0; v + 1 < tr.visits.size(); ++v) {
            Hop h;
            h.train = static_cast<int>(ti);
            h.segment = line.segments[hop_segment_position(line, tr.direction, v)];
            h.from = tr.visits[v].station;
            h.to = tr.visits[v + 1].station;
            h.dep = tr.visits[v].dep;
            h.arr = tr.visits[v + 1].arr;
            h.parallel = tr.parallel[v];
            h.line = tr.line;
            h.direction = tr.direction;
            h.dup = tr.dup;
            hops.push_back(h);
        }
    }

    // Departure/arrival headways on the same physical track at the same station.
    for (size_t i = 0; i < events.size(); ++i) {
        for (size_t j = i + 1; j < events.size(); ++j) {
            const auto& a = events[i];
            const auto& b = events[j];
            if (a.kind != b.kind || a.station != b.station || a.segment != b.segment ||
                a.parallel != b.parallel)
                continue;
            bool dep = a.kind == EventKind::departure;
            int hw = dep ? inst.dep_headway(a.segment, a.station)
                         : inst.arr_headway(a.segment, a.station);
            if (hw <= 0) continue;
            if (cyc_dist(a.time, b.time, T) < hw) {
                std::ostringstream os;
                os << (dep ? "departures" : "arrivals") << " at "
                   << inst.stations[a.station].name << " on "
                   << inst.segments[a.segment].name << " " << a.time << " vs " << b.time
                   << " closer than " << hw;
                add(dep ? ConflictType::dep_headway : ConflictType::arr_headway, os.str(),
                    event_train[i], event_train[j]);
            }
        }
    }

    // Single-platform stations: any two arrivals spread by the platform headway.
    for (size_t i = 0; i < events.size(); ++i) {
        for (size_t j = i + 1; j < events.size(); ++j) {
            const auto& a = events[i];
            const auto& b = events[j];
            if (a.kind != EventKind::arrival || b.kind != EventKind::arrival) continue;
            if (a.station != b.station) continue;
            if (!inst.stations[a.station].single_platform) continue;
            int hw = inst.platform_headway(a.station);
            if (hw <= 0) continue;
            if (cyc_dist(a.time, b.time, T) < hw) {
                std::ostringstream os;
                os << "arrivals at single-platform " << inst.stations[a.station].name
                   << " " << a.time << " vs " << b.time << " closer than " << hw;
                add(ConflictType::platform_headway, os.str(), event_train[i],
                    event_train[j]);
            }
        }
    }

    // Single-track segments: opposite traversals must not overlap, and a
    // departure must wait out the opposite gap after an opposite arrival.
    for (size_t i = 0; i < hops.size(); ++i) {
        for (size_t j = 0; j < hops.size(); ++j) {
            if (i == j) continue;
            const auto& a = hops[i];
            const auto& b = hops[j];
            if (a.segment != b.segment) continue;
            if (inst.segments[a.segment].kind != SegmentKind::single_track) continue;
            if (a.from != b.to || a.to != b.from) continue;  // same direction handled below
            if (j < i) continue;  // opposite pairs once
            int la = cyc_delta(a.dep, a.arr, T);
            int lb = cyc_delta(b.dep, b.arr, T);
            if (open_intervals_overlap(a.dep, la, b.dep, lb, T)) {
                std::ostringstream os;
                os << "opposite trains meet on single track "
                   << inst.segments[a.segment].name;
                add(ConflictType::crossing, os.str(), a.train, b.train);
            }
        }
    }
    for (const auto& a : hops) {
        // a departs a.from; opposite arrivals at a.from on the same segment.
        if (inst.segments[a.segment].kind != SegmentKind::single_track) continue;
        int f = inst.opposite_gap(a.segment, a.from);
        if (f <= 0) continue;
        for (const auto& b : hops) {
            if (b.segment != a.segment || b.to != a.from) continue;
            if (&a == &b) continue;
            int gap = cyc_delta(b.arr, a.dep, T);
            if (gap < f) {
                std::ostringstream os;
                os << "departure from " << inst.stations[a.from].name << " only " << gap
                   << " after opposite arrival on " << inst.segments[a.segment].name;
                add(ConflictType::crossing, os.str(), a.train, b.train);
            }
        }
    }

    // Overtaking inside a segment: same track, same direction, the later
    // entrant leaves first.
    for (size_t i = 0; i < hops.size(); ++i) {
        for (size_t j = 0; j < hops.size(); ++j) {
            if (i == j) continue;
            const auto& a = hops[i];  // candidate slower train
            const auto& b = hops[j];
            if (a.segment != b.segment || a.from != b.from || a.to != b.to) continue;
            if (a.parallel != b.parallel) continue;
            int la = cyc_delta(a.dep, a.arr, T);
            int lb = cyc_delta(b.dep, b.arr, T);
            int d = cyc_delta(a.dep, b.dep, T);
            if (d > 0 && d + lb < la) {
                std::ostringstream os;
                os << "overtaking on " << inst.segments[a.segment].name << ": dep "
                   << a.dep << "/" << b.dep << ", arr " << a.arr << "/" << b.arr;
                add(ConflictType::overtaking, os.str(), a.train, b.train);
            }
        }
    }

    // Sibling spread: departures of the pair from a common station onto a
    // common segment, per direction of travel.
    int ts = inst.params.hw_sibling;
    if (ts > 0) {
        for (const auto& [la, lb] : inst.siblings) {
            for (size_t i = 0; i < hops.size(); ++i) {
                for (size_t j = i + 1; j < hops.size(); ++j) {
                    const auto& a = hops[i];
                    const auto& b = hops[j];
                    bool pair_match = (a.line == la && b.line == lb) ||
                                      (a.line == lb && b.line == la) ||
                                      (a.line == la && b.line == la) ||
                                      (a.line == lb && b.line == lb);
                    if (!pair_match) continue;
                    if (a.segment != b.segment || a.from != b.from || a.to != b.to)
                        continue;
                    if (a.train == b.train) continue;
                    if (cyc_dist(a.dep, b.dep, T) < ts) {
                        std::ostringstream os;
                        os << "sibling departures from " << inst.stations[a.from].name
                           << " spread " << cyc_dist(a.dep, b.dep, T) << " < " << ts;
                        add(ConflictType::sibling_spread, os.str(), a.train, b.train);
                    }
                }
            }
        }
    }

    return rep;
}

std::string conflict_report_to_json_lines(const ConflictReport& rep) {
    std::ostringstream os;
    for (const auto& c : rep.conflicts) {
        nlohmann::ordered_json j;
        j["type"] = conflict_type_name(c.type);
        j["description"] = c.description;
        j["train_a"] = c.train_a;
        j["train_b"] = c.train_b;
        os << j.dump() << "\n";
    }
    return os.str();
}

}  // namespace takt
