#pragma once

#include <string>
#include <vector>

#include "takt/timetable.hpp"

namespace takt {

// Standalone feasibility checker. Works purely on scheduled trains and the
// instance; shares no logic with graph construction, the restricted master
// or the separators, so it can serve as the oracle for all of them.

enum class ConflictType {
    structure,          // malformed train w.r.t. its line definition
    running_time,       // hop duration differs from the line's running time
    dwell,              // dwell outside [min, max]
    symmetry,           // departure + opposite arrival outside T +- kappa
    frequency_shift,    // second train pair not offset by exactly T/2
    track_choice,       // quadruple choice varies along a chain or per train
    dep_headway,
    arr_headway,
    platform_headway,   // opposite arrivals at a single-platform station
    crossing,           // single-track occupancy overlap or opposite gap
    overtaking,
    sibling_spread,
};

struct Conflict {
    ConflictType type;
    std::string description;
    int train_a = -1;  // indices into the solution's train list
    int train_b = -1;
};

struct ConflictReport {
    std::vector<Conflict> conflicts;
    bool ok() const { return conflicts.empty(); }
};

// Checks every pairwise rule over the given trains. Partial solutions are
// fine: only the trains present are examined, so enumeration code can prune
// with incrementally grown solutions.
ConflictReport check_timetable(const NetworkInstance& inst,
                               const TimetableSolution& sol);

std::string conflict_type_name(ConflictType t);

// One JSON object per conflict, newline separated.
std::string conflict_report_to_json_lines(const ConflictReport& rep);

}  // namespace takt
