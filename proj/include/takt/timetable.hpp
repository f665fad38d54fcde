#pragma once

#include <string>
#include <vector>

#include "takt/instance.hpp"
#include "takt/periodic.hpp"

namespace takt {

// One scheduled train: a single directed traversal of its line. Lines with
// frequency 2 produce two trains per direction (dup 0 and 1), offset by half
// a period.
struct StationTime {
    int station = -1;
    int arr = 0;  // equals dep at the origin and at pass-through stations
    int dep = 0;  // equals arr at the terminus
};

struct TrainPath {
    int line = -1;
    int direction = kOutbound;
    int dup = 0;
    std::vector<StationTime> visits;   // in travel order
    std::vector<int> parallel;         // track index per hop (quadruple: 0/1)
    int duration = 0;                  // unrolled end-to-end time
};

struct TimetableSolution {
    std::vector<TrainPath> trains;
    long long path_length = 0;  // sum of train durations
    bool feasible = false;
    double ptt = 0.0;           // filled in once passengers are routed
};

enum class EventKind { departure, arrival };

// A single track-usage event, the unit all headway reasoning works on.
struct TrackEvent {
    int station = -1;
    int segment = -1;
    int parallel = 0;
    EventKind kind = EventKind::departure;
    int time = 0;
    int line = -1;
    int direction = kOutbound;
    int dup = 0;
};

// Every departure/arrival the train makes, pass-through stations included.
std::vector<TrackEvent> train_events(const Line& line, const TrainPath& train);

// Line position of the k-th visited station for a direction of travel.
inline int line_position(const Line& line, int direction, int visit) {
    return direction == kOutbound ? visit : line.num_stations() - 1 - visit;
}

// Segment position crossed between visits k and k+1.
inline int hop_segment_position(const Line& line, int direction, int visit) {
    return direction == kOutbound ? visit : line.num_segments() - 1 - visit;
}

std::string timetable_to_json(const NetworkInstance& inst, const TimetableSolution& sol);
TimetableSolution timetable_from_json(const NetworkInstance& inst, const std::string& text);
void save_timetable(const NetworkInstance& inst, const TimetableSolution& sol,
                    const std::string& path);
TimetableSolution load_timetable(const NetworkInstance& inst, const std::string& path);

}  // namespace takt
