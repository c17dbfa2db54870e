#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "pdefense/simulation.hpp"
#include "pdefense/static_design.hpp"

namespace pdefense {

nlohmann::json design_to_json(const StaticDesign& d, const std::string& config_hash);

// Inverse of design_to_json. Throws std::runtime_error on malformed input.
StaticDesign design_from_json(const nlohmann::json& j);

// Region boundaries as region,index,x,y rows.
void write_regions_csv(std::ostream& out, const StaticDesign& d);

// Deterministic fields only, so repeated runs give identical files.
nlohmann::json summary_to_json(const SimResult& r, const SimConfig& cfg, const std::string& config_hash);

std::string to_string(StationRule r);

}  // namespace pdefense
