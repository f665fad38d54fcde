#pragma once

#include <string>
#include <vector>

#include "takt/instance.hpp"
#include "takt/passenger.hpp"
#include "takt/timetable.hpp"

namespace takt {

// Distance-time diagram along a corridor of stations: one polyline per train
// traversal of the corridor, trains that cross the end of the period split
// at the wrap.  Train colors cycle per line; the opposite direction is
// dashed.  `corridor` lists station ids in drawing order.
std::string corridor_svg(const NetworkInstance& inst, const TimetableSolution& sol,
                         const std::vector<int>& corridor);

// The longest line's station sequence; a sensible default corridor.
std::vector<int> default_corridor(const NetworkInstance& inst);

// One row per commodity: demand, perceived time, leg-by-leg route.
std::string transfer_csv(const NetworkInstance& inst,
                         const std::vector<double>& per_commodity,
                         const std::vector<CommodityRoute>& routes);

}  // namespace takt
