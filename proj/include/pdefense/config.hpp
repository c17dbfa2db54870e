#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pdefense/simulation.hpp"
#include "pdefense/static_design.hpp"

namespace pdefense {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Value tree for the small TOML subset the tool reads: [tables], key = value
// pairs, numbers, "strings", booleans, and (nested) arrays. Comments start
// with '#'.
struct ConfigValue {
  using Array = std::vector<ConfigValue>;
  std::variant<double, std::string, bool, Array> v;
};

// Flattened "table.key" -> value.
using ConfigDocument = std::map<std::string, ConfigValue>;

ConfigDocument parse_config(const std::string& text);
ConfigDocument load_config_file(const std::string& path);

struct MonteCarloSweep {
  std::size_t runs = 100;
  std::vector<double> omegas_deg{0.0, 15.0, 30.0, 45.0};
  std::vector<std::size_t> concurrent{6, 8, 10};
  std::vector<Baseline> baselines{Baseline::pdream, Baseline::dream};
};

struct RunConfig {
  std::vector<Point2> territory;
  DesignConfig design;
  bool auto_stations = true;  // false when n_stations or stations pin the count
  SimConfig sim;
  MonteCarloSweep sweep;
  std::string hash;  // stable digest of the parsed document
};

// Validates every field; errors name the offending key.
RunConfig run_config_from(const ConfigDocument& doc);
RunConfig load_run_config(const std::string& path);

// Builds the territory (throws ConfigError naming territory.vertices).
ConvexPolygon territory_of(const RunConfig& cfg);

}  // namespace pdefense
