#ifndef MSLAB_CONFIG_HPP
#define MSLAB_CONFIG_HPP

// Structured configuration documents (JSON, "schema_version": 1). Every
// parse error is a ConfigError whose key() is the JSON path of the offending
// entry, e.g. "modes[2].chirality".

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mslab/edge_ensemble.hpp"
#include "mslab/wire_algebra.hpp"

namespace mslab {

inline constexpr int kSchemaVersion = 1;

nlohmann::json load_json_file(const std::string& path);

struct BlockConfig {
  std::string name;
  WireArray array;
  std::int64_t bound = 3;
  std::optional<bool> expect_closed;
  std::optional<bool> expect_open;
};

// {schema_version, name?, modes[{id, x, y?, chirality, flavor?, charge?}],
//  generators[{name, modulation, strength?}], regions?{id: label}, bound?,
//  expect?{closed_realizable?, open_realizable?}}
// modulation: {type: "polynomial", axis?, coeffs} | {type: "plane", axis, value}
//           | {type: "table", entries[{x, y?, value}]}
BlockConfig parse_block(const nlohmann::json& doc);

struct EnsembleConfig {
  EnsembleSpec spec;
  bool seed_given = false;
  bool orbit_average = true;
  double charge_angle = 3.141592653589793;
  double dipole_angle = 0.9;
};

// {schema_version, sites?, samples?, seed?, mass?, stiffness?,
//  winding?{sectors, probabilities} | winding?: int, wilson?, velocity?,
//  pair_budget?, fit_min?, fit_max?, orbit_average?, charge_angle?, dipole_angle?}
EnsembleConfig parse_ensemble(const nlohmann::json& doc);

// "key=value" with value parsed as JSON when possible, else as a string.
// Dotted keys address nested objects. Unknown keys are rejected by the
// subsequent parse.
void apply_override(nlohmann::json& doc, const std::string& assignment);

}  // namespace mslab

#endif  // MSLAB_CONFIG_HPP
