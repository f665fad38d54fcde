#pragma once

#include <array>
#include <string>
#include <vector>

namespace takt {

// All durations below are integer instants (period instants per cycle).
// File formats use minutes; conversion happens at the JSON boundary.

enum class SegmentKind { single_track, double_track, quadruple_track };

struct Station {
    std::string name;
    bool hub = false;
    // Stations with one platform track shared by both directions. Only
    // meaningful when every incident segment is single track.
    bool single_platform = false;
    // Min spacing between any two arrivals at a single-platform station.
    // -1 means "use the network-wide headway".
    int platform_arr_headway = -1;
};

struct TrackSegment {
    std::string name;
    int station_a = -1;
    int station_b = -1;
    SegmentKind kind = SegmentKind::double_track;
    int dep_headway = 0;   // same-track consecutive departures
    int arr_headway = 0;   // same-track consecutive arrivals
    // Min gap between an opposite-direction arrival and the next departure
    // at the same end of a single-track segment. Zero by default: a train
    // may leave the moment the opposing one has arrived.
    int opposite_gap = 0;

    int parallel_tracks_per_direction() const {
        return kind == SegmentKind::quadruple_track ? 2 : 1;
    }
};

// Directions along a line: 0 follows the station list as written,
// 1 traverses it in reverse.
inline constexpr int kOutbound = 0;
inline constexpr int kInbound = 1;

struct Line {
    std::string name;
    std::vector<int> stations;        // visited station ids, in outbound order
    std::vector<uint8_t> stops;       // per station: train calls there
    std::vector<int> segments;        // segment id per consecutive pair
    // run[d][k]: running time over segment position k in direction d.
    std::array<std::vector<int>, 2> run;
    // min_dwell[d][i]: minimum dwell at intermediate position i (1..n-2),
    // indexed by position along the written station list for both directions.
    std::array<std::vector<int>, 2> min_dwell;
    int frequency = 1;                // 1 or 2 train pairs per period
    bool rush_hour = false;           // one-direction service
    int rush_direction = kOutbound;

    int num_stations() const { return static_cast<int>(stations.size()); }
    int num_segments() const { return static_cast<int>(segments.size()); }
};

struct ODEntry {
    int from = -1;
    int to = -1;
    double demand = 0.0;
};

struct Params {
    int period = 120;           // instants per cycle
    int kappa = 3;              // symmetry slack, instants
    int hw_hub = -1;            // headway override at hub stations, -1 = none
    int hw_network = -1;        // network-wide headway override, -1 = none
    int hw_sibling = 30;        // min spread between sibling departures
    int min_transfer = 10;      // min passenger transfer time
    int max_extra_dwell = 6;    // max dwell = min dwell + this
    double alpha = -1.0;        // travel-time weight, -1 = 1/total demand
    std::vector<int> representative_stations;  // commodity filter for cuts
};

struct NetworkInstance {
    std::vector<Station> stations;
    std::vector<TrackSegment> segments;
    std::vector<Line> lines;
    std::vector<std::pair<int, int>> siblings;  // line id pairs
    std::vector<ODEntry> od;
    Params params;

    // Effective headways after network/hub overrides. `station` is the
    // endpoint the event happens at.
    int dep_headway(int segment, int station) const;
    int arr_headway(int segment, int station) const;
    int platform_headway(int station) const;
    int opposite_gap(int segment, int station) const;

    int max_dwell(const Line& line, int direction, int position) const;

    double total_demand() const;
    double effective_alpha() const;

    // Station ids adjacent to `station` through single-track segments.
    bool all_incident_single(int station) const;

    int find_station(const std::string& name) const;
    int find_line(const std::string& name) const;
    int find_segment(int station_a, int station_b) const;
};

struct ValidationIssue {
    std::string where;
    std::string what;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
};

ValidationReport validate_instance(const NetworkInstance& inst);

// Station-level connectivity over stop patterns, ignoring times. The same
// predicate validation applies to OD entries.
bool od_reachable(const NetworkInstance& inst, int from, int to);

}  // namespace takt
