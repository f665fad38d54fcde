#pragma once

#include <stdexcept>
#include <string>

#include "takt/instance.hpp"

namespace takt {

// Instance files carry times in minutes (0.5-minute steps allowed); in
// memory everything is half-minute instants. Structural problems (unknown
// ids, misaligned times) throw instance_format_error; value-level issues
// are left to validate_instance.

class instance_format_error : public std::runtime_error {
public:
    explicit instance_format_error(const std::string& what)
        : std::runtime_error(what) {}
};

NetworkInstance load_instance(const std::string& path);
NetworkInstance parse_instance(const std::string& json_text);
std::string instance_to_json(const NetworkInstance& inst);
void save_instance(const NetworkInstance& inst, const std::string& path);

// Half-minute grid conversion helpers shared by all file formats.
int minutes_to_instants(double minutes);
double instants_to_minutes(int instants);

}  // namespace takt
