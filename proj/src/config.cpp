#include "mslab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "mslab/errors.hpp"

namespace mslab {

using nlohmann::json;

namespace {

std::string child(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string item(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
}

void allow_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(child(path, k), "unknown key");
}

const json& need(const json& j, const std::string& path, const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(child(path, key), "missing required key");
  return *it;
}

std::int64_t as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<std::int64_t>();
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array");
  return j;
}

void check_schema(const json& doc) {
  require_object(doc, "");
  const auto& v = need(doc, "", "schema_version");
  if (as_int(v, "schema_version") != kSchemaVersion)
    throw ConfigError("schema_version", "unsupported schema version (expected 1)");
}

Axis parse_axis(const json& j, const std::string& path) {
  const std::string s = as_string(j, path);
  if (s == "x") return Axis::X;
  if (s == "y") return Axis::Y;
  throw ConfigError(path, "axis must be \"x\" or \"y\"");
}

Modulation parse_modulation(const json& j, const std::string& path) {
  require_object(j, path);
  const std::string type = as_string(need(j, path, "type"), child(path, "type"));
  if (type == "polynomial") {
    allow_keys(j, path, {"type", "axis", "coeffs"});
    Polynomial p;
    if (j.contains("axis")) p.axis = parse_axis(j["axis"], child(path, "axis"));
    const auto& cs = as_array(need(j, path, "coeffs"), child(path, "coeffs"));
    for (std::size_t i = 0; i < cs.size(); ++i) p.coeffs.push_back(as_int(cs[i], item(child(path, "coeffs"), i)));
    return p;
  }
  if (type == "plane") {
    allow_keys(j, path, {"type", "axis", "value"});
    return PlaneIndicator{parse_axis(need(j, path, "axis"), child(path, "axis")),
                          as_int(need(j, path, "value"), child(path, "value"))};
  }
  if (type == "table") {
    allow_keys(j, path, {"type", "entries"});
    Tabulated t;
    const std::string ep = child(path, "entries");
    const auto& es = as_array(need(j, path, "entries"), ep);
    for (std::size_t i = 0; i < es.size(); ++i) {
      const std::string p = item(ep, i);
      require_object(es[i], p);
      allow_keys(es[i], p, {"x", "y", "value"});
      const std::int64_t x = as_int(need(es[i], p, "x"), child(p, "x"));
      const std::int64_t y = es[i].contains("y") ? as_int(es[i]["y"], child(p, "y")) : 0;
      t.table[{x, y}] = as_int(need(es[i], p, "value"), child(p, "value"));
    }
    return t;
  }
  throw ConfigError(child(path, "type"), "modulation type must be polynomial, plane or table");
}

Chirality parse_chirality(const json& j, const std::string& path) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "R") return Chirality::Right;
    if (s == "L") return Chirality::Left;
  } else if (j.is_number_integer()) {
    const auto v = j.get<std::int64_t>();
    if (v == 1) return Chirality::Right;
    if (v == -1) return Chirality::Left;
  }
  throw ConfigError(path, "chirality must be \"R\", \"L\", 1 or -1");
}

}  // namespace

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("file", "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("file", std::string("malformed JSON: ") + e.what());
  }
}

BlockConfig parse_block(const json& doc) {
  check_schema(doc);
  allow_keys(doc, "", {"schema_version", "name", "modes", "generators", "regions", "bound", "expect"});
  BlockConfig cfg;
  if (doc.contains("name")) cfg.name = as_string(doc["name"], "name");
  if (doc.contains("bound")) {
    cfg.bound = as_int(doc["bound"], "bound");
    if (cfg.bound < 1) throw ConfigError("bound", "must be >= 1");
  }

  std::vector<ChiralMode> modes;
  const auto& ms = as_array(need(doc, "", "modes"), "modes");
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const std::string p = item("modes", i);
    require_object(ms[i], p);
    allow_keys(ms[i], p, {"id", "x", "y", "chirality", "flavor", "charge"});
    ChiralMode m;
    m.id = as_string(need(ms[i], p, "id"), child(p, "id"));
    const std::int64_t x = as_int(need(ms[i], p, "x"), child(p, "x"));
    m.position = ms[i].contains("y") ? Position::at(x, as_int(ms[i]["y"], child(p, "y"))) : Position::at(x);
    m.chirality = parse_chirality(need(ms[i], p, "chirality"), child(p, "chirality"));
    if (ms[i].contains("flavor")) m.flavor = as_string(ms[i]["flavor"], child(p, "flavor"));
    if (ms[i].contains("charge")) {
      m.base_charge = as_int(ms[i]["charge"], child(p, "charge"));
      if (m.base_charge == 0) throw ConfigError(child(p, "charge"), "base charge must be nonzero");
    }
    modes.push_back(std::move(m));
  }

  std::vector<SymmetryGenerator> gens;
  const auto& gs = as_array(need(doc, "", "generators"), "generators");
  for (std::size_t i = 0; i < gs.size(); ++i) {
    const std::string p = item("generators", i);
    require_object(gs[i], p);
    allow_keys(gs[i], p, {"name", "modulation", "strength"});
    SymmetryGenerator g;
    g.name = as_string(need(gs[i], p, "name"), child(p, "name"));
    g.modulation = parse_modulation(need(gs[i], p, "modulation"), child(p, "modulation"));
    if (gs[i].contains("strength")) {
      const std::string s = as_string(gs[i]["strength"], child(p, "strength"));
      if (s == "strong") g.strength = Strength::Strong;
      else if (s == "weak") g.strength = Strength::Weak;
      else throw ConfigError(child(p, "strength"), "strength must be \"strong\" or \"weak\"");
    }
    gens.push_back(std::move(g));
  }

  std::map<std::string, std::string> regions;
  if (doc.contains("regions")) {
    require_object(doc["regions"], "regions");
    for (const auto& [k, v] : doc["regions"].items()) regions[k] = as_string(v, child("regions", k));
  }

  if (doc.contains("expect")) {
    const auto& e = doc["expect"];
    require_object(e, "expect");
    allow_keys(e, "expect", {"closed_realizable", "open_realizable"});
    if (e.contains("closed_realizable")) cfg.expect_closed = as_bool(e["closed_realizable"], "expect.closed_realizable");
    if (e.contains("open_realizable")) cfg.expect_open = as_bool(e["open_realizable"], "expect.open_realizable");
  }

  try {
    cfg.array = WireArray(std::move(modes), std::move(gens), std::move(regions));
  } catch (const PreconditionError& e) {
    throw ConfigError("modes", e.what());
  }
  return cfg;
}

EnsembleConfig parse_ensemble(const json& doc) {
  check_schema(doc);
  allow_keys(doc, "", {"schema_version", "sites", "samples", "seed", "mass", "stiffness", "winding", "wilson",
                       "velocity", "pair_budget", "fit_min", "fit_max", "orbit_average", "charge_angle",
                       "dipole_angle"});
  EnsembleConfig cfg;
  auto& s = cfg.spec;
  if (doc.contains("sites")) s.sites = as_int(doc["sites"], "sites");
  if (doc.contains("samples")) s.samples = as_int(doc["samples"], "samples");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<std::int64_t>() >= 0))
      throw ConfigError("seed", "expected a nonnegative integer");
    s.seed = doc["seed"].get<std::uint64_t>();
    cfg.seed_given = true;
  }
  if (doc.contains("mass")) s.mass = as_double(doc["mass"], "mass");
  if (doc.contains("stiffness")) s.stiffness = as_double(doc["stiffness"], "stiffness");
  if (doc.contains("wilson")) s.wilson = as_double(doc["wilson"], "wilson");
  if (doc.contains("velocity")) s.velocity = as_double(doc["velocity"], "velocity");
  if (doc.contains("pair_budget")) {
    const auto b = as_int(doc["pair_budget"], "pair_budget");
    if (b < 1) throw ConfigError("pair_budget", "must be >= 1");
    s.pair_budget = static_cast<std::size_t>(b);
  }
  if (doc.contains("fit_min")) s.fit_min = as_int(doc["fit_min"], "fit_min");
  if (doc.contains("fit_max")) s.fit_max = as_int(doc["fit_max"], "fit_max");
  if (doc.contains("winding")) {
    const auto& w = doc["winding"];
    if (w.is_number_integer()) {
      s.winding = WindingRule::fixed(static_cast<int>(w.get<std::int64_t>()));
    } else {
      require_object(w, "winding");
      allow_keys(w, "winding", {"sectors", "probabilities"});
      WindingRule rule;
      rule.windings.clear();
      rule.probabilities.clear();
      const auto& sec = as_array(need(w, "winding", "sectors"), "winding.sectors");
      for (std::size_t i = 0; i < sec.size(); ++i)
        rule.windings.push_back(static_cast<int>(as_int(sec[i], item("winding.sectors", i))));
      if (w.contains("probabilities")) {
        const auto& pr = as_array(w["probabilities"], "winding.probabilities");
        for (std::size_t i = 0; i < pr.size(); ++i)
          rule.probabilities.push_back(as_double(pr[i], item("winding.probabilities", i)));
      } else {
        rule.probabilities.assign(rule.windings.size(), rule.windings.empty() ? 0.0 : 1.0 / static_cast<double>(rule.windings.size()));
      }
      if (rule.windings.empty()) throw ConfigError("winding.sectors", "needs at least one sector");
      if (rule.probabilities.size() != rule.windings.size())
        throw ConfigError("winding.probabilities", "needs one probability per sector");
      s.winding = rule;
    }
  }
  if (doc.contains("orbit_average")) cfg.orbit_average = as_bool(doc["orbit_average"], "orbit_average");
  if (doc.contains("charge_angle")) cfg.charge_angle = as_double(doc["charge_angle"], "charge_angle");
  if (doc.contains("dipole_angle")) cfg.dipole_angle = as_double(doc["dipole_angle"], "dipole_angle");

  try {
    s.validate();
  } catch (const PreconditionError& e) {
    const std::string what = e.what();
    const auto colon = what.find(':');
    throw ConfigError(colon == std::string::npos ? "" : what.substr(0, colon),
                      colon == std::string::npos ? what : what.substr(colon + 2));
  }
  return cfg;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(assignment, "override must look like key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json* node = &doc;
  std::stringstream ks(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ks, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object()) throw ConfigError(key, "override path crosses a non-object");
    node = &(*node)[parts[i]];
    if (node->is_null()) *node = json::object();
  }
  if (!node->is_object()) throw ConfigError(key, "override path crosses a non-object");
  (*node)[parts.back()] = value;
}

}  // namespace mslab
