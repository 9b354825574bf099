// Command-line front end. Exit codes: 0 success, 1 verdict/acceptance
// mismatch or numerical failure, 2 configuration or usage error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mslab/acceptance.hpp"
#include "mslab/config.hpp"
#include "mslab/ed_oracle.hpp"
#include "mslab/edge_ensemble.hpp"
#include "mslab/errors.hpp"
#include "mslab/gaussian_core.hpp"
#include "mslab/serialize.hpp"
#include "mslab/version.hpp"
#include "mslab/wire_algebra.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mslab;

namespace {

constexpr int kOk = 0;
constexpr int kMismatch = 1;
constexpr int kConfig = 2;

// Thrown for bad command-line combinations; reported like config errors.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string pretty(const json& j) { return j.dump(2) + "\n"; }

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << content;
}

fs::path prepare_out(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

// Either writes `name` under --out and returns true, or leaves printing to
// the caller.
bool emit(const std::string& out, const std::string& name, const std::string& content) {
  if (out.empty()) return false;
  write_file(prepare_out(out) / name, content);
  return true;
}

struct EnsembleFlags {
  std::string file;
  std::optional<std::uint64_t> seed;
  std::optional<Index> n;
  std::optional<double> m;
  std::optional<double> g;
  std::optional<int> w;
  std::optional<Index> samples;
  std::optional<double> wilson;
  std::vector<std::string> overrides;

  void attach(CLI::App* app) {
    app->add_option("--file", file, "Ensemble config (JSON)");
    app->add_option("--seed", seed, "Root seed");
    app->add_option("--n", n, "Ring sites N");
    app->add_option("--m", m, "Mass magnitude");
    app->add_option("--g", g, "Phase stiffness g");
    app->add_option("--w", w, "Fixed winding sector");
    app->add_option("--samples", samples, "Valid samples K");
    app->add_option("--wilson", wilson, "Wilson coupling b");
    app->add_option("--set", overrides, "Config override key=value (repeatable)");
  }

  EnsembleConfig resolve() const {
    json doc = file.empty() ? json{{"schema_version", kSchemaVersion}} : load_json_file(file);
    for (const auto& o : overrides) apply_override(doc, o);
    EnsembleConfig cfg = parse_ensemble(doc);
    if (seed) {
      cfg.spec.seed = *seed;
      cfg.seed_given = true;
    }
    if (!cfg.seed_given) throw UsageError("--seed is required for stochastic commands");
    if (n) cfg.spec.sites = *n;
    if (m) cfg.spec.mass = *m;
    if (g) cfg.spec.stiffness = *g;
    if (w) cfg.spec.winding = WindingRule::fixed(*w);
    if (samples) cfg.spec.samples = *samples;
    if (wilson) cfg.spec.wilson = *wilson;
    try {
      cfg.spec.validate();
    } catch (const PreconditionError& e) {
      const std::string msg = e.what();
      const auto colon = msg.find(':');
      throw ConfigError(colon == std::string::npos ? "ensemble" : msg.substr(0, colon),
                        colon == std::string::npos ? msg : msg.substr(colon + 2));
    }
    return cfg;
  }
};

int cmd_gap_scan(const std::string& block, const std::string& file, std::optional<std::int64_t> bound,
                 const std::string& out) {
  if (block.empty() == file.empty()) throw UsageError("gap-scan needs exactly one of --block or --file");
  std::string name = block;
  WireArray array;
  std::int64_t b = 3;
  if (!file.empty()) {
    const BlockConfig cfg = parse_block(load_json_file(file));
    name = cfg.name;
    array = cfg.array;
    b = cfg.bound;
  } else {
    try {
      array = blocks::by_name(block);
    } catch (const LookupError&) {
      throw ConfigError("block", "unknown block '" + block + "'");
    }
  }
  if (bound) b = *bound;
  const VertexEnumeration en = enumerate_symmetric_vertices(array, b);
  const GappingResult gap = max_gappable_set(array, b);
  json rec = gap_scan_record(name, array, en, gap);
  rec["version"] = MSLAB_VERSION;
  std::ostringstream summary;
  summary << "gap-scan " << name << ": bound " << b << ", gapping rank " << en.gapping_rank() << ", symmetric rank "
          << en.symmetric_rank() << ", " << gap.vertices.size() << " gapping vertices, fully_gapped "
          << (gap.fully_gapped ? "true" : "false");
  if (emit(out, "gap_scan.json", pretty(rec)))
    std::cout << summary.str() << "\n";
  else
    std::cout << pretty(rec);
  return kOk;
}

int cmd_anomaly(const std::string& name, const std::string& file, const std::string& out) {
  if (name.empty() == file.empty()) throw UsageError("anomaly needs exactly one of --scenario or --file");
  ChannelSet set;
  std::optional<bool> expect_closed, expect_open, expect_forced;
  std::string edge_region;
  std::string label = name;
  if (!file.empty()) {
    const BlockConfig cfg = parse_block(load_json_file(file));
    set = cfg.array;
    expect_closed = cfg.expect_closed;
    expect_open = cfg.expect_open;
    label = cfg.name;
  } else {
    Scenario s;
    try {
      s = scenario(name);
    } catch (const LookupError&) {
      throw ConfigError("scenario", "unknown scenario '" + name + "'");
    }
    set = s.channels;
    expect_closed = s.expect_closed;
    expect_open = s.expect_open;
    expect_forced = s.expect_forced;
    edge_region = s.edge_region;
  }
  json rep = anomaly_report(set);
  bool match = true;
  json expect = json::object();
  if (expect_closed) {
    expect["closed_realizable"] = *expect_closed;
    match = match && rep["closed_realizable"].get<bool>() == *expect_closed;
  }
  if (expect_open) {
    expect["open_realizable"] = *expect_open;
    match = match && rep["open_realizable"].get<bool>() == *expect_open;
  }
  if (expect_forced) {
    const HierarchyReport h = multipole_hierarchy(set, edge_region);
    rep["hierarchy"] = to_json(h);
    expect["forced_self_anomaly"] = *expect_forced;
    match = match && h.forced_self_anomaly == *expect_forced;
  }
  rep["scenario"] = label;
  rep["expected"] = expect;
  rep["matches_expectation"] = match;
  rep["version"] = MSLAB_VERSION;
  std::ostringstream summary;
  summary << "anomaly " << label << ": closed_realizable " << rep["closed_realizable"].get<bool>()
          << ", open_realizable " << rep["open_realizable"].get<bool>() << (match ? "" : " (EXPECTATION MISMATCH)");
  if (emit(out, "anomaly.json", pretty(rep)))
    std::cout << summary.str() << "\n";
  else
    std::cout << pretty(rep);
  return match ? kOk : kMismatch;
}

int cmd_spectral_flow(Index n, double m, int w, double wilson, double velocity, const std::string& out) {
  if (n < 2) throw ConfigError("n", "need at least 2 sites");
  if (!(m > 0)) throw ConfigError("m", "mass magnitude must be positive");
  std::vector<int> windings;
  for (int k = std::min(0, w); k <= std::max(0, w); ++k) windings.push_back(k);
  const auto rows = spectral_flow_charge(EdgeModel{n, velocity, wilson, 0.0}, m, windings);
  bool ok = true;
  for (const auto& r : rows) ok = ok && r.delta_charge == r.winding;
  std::ostringstream csv;
  write_spectral_flow_csv(csv, rows);
  if (!out.empty()) {
    emit(out, "spectral_flow.csv", csv.str());
    json summary{{"version", MSLAB_VERSION},
                 {"config", {{"n", n}, {"m", m}, {"w", w}, {"wilson", wilson}, {"velocity", velocity}}},
                 {"delta_q_equals_w", ok}};
    emit(out, "spectral_flow.json", pretty(summary));
    std::cout << "spectral-flow N=" << n << " |m|=" << m << ": dQ(" << w << ")=" << rows.back().delta_charge
              << (ok ? "" : " (dQ != w)") << "\n";
  } else {
    std::cout << csv.str();
  }
  return ok ? kOk : kMismatch;
}

int cmd_edge_corr(const EnsembleFlags& flags, const std::string& op, const std::string& out) {
  const EnsembleConfig cfg = flags.resolve();
  const Ensemble ens = draw_ensemble(cfg.spec);
  std::vector<std::string> ops;
  if (op == "all")
    ops = {"G", "S", "renyi2"};
  else
    ops = {op};
  json summary{{"version", MSLAB_VERSION}, {"config", to_json(cfg.spec)}, {"correlators", json::object()}};
  summary["rejected"] = {{"winding", ens.rejected_winding}, {"gapless", ens.rejected_gapless}, {"charge", ens.rejected_charge}};
  std::ostringstream line;
  line << "edge-corr N=" << cfg.spec.sites << " K=" << ens.size() << ":";
  std::string csv_stdout;
  for (const auto& o : ops) {
    const CorrelatorEstimate est = o == "G"   ? linear_correlator(ens, LinearOperator::G)
                                   : o == "S" ? linear_correlator(ens, LinearOperator::S)
                                              : renyi2_correlator(ens);
    summary["correlators"][o] = correlator_summary(est);
    std::ostringstream csv;
    write_correlator_csv(csv, est);
    if (!out.empty()) emit(out, "corr_" + o + ".csv", csv.str());
    csv_stdout += csv.str();
    line << " " << o << " ";
    if (est.fit)
      line << to_string(est.fit->model) << " " << est.fit->exponent_or_length() << " (R2 " << est.fit->r2() << ")";
    else
      line << "no fit";
  }
  if (emit(out, "edge_corr.json", pretty(summary)))
    std::cout << line.str() << "\n";
  else if (ops.size() == 1)
    std::cout << csv_stdout;
  else
    std::cout << pretty(summary);
  return kOk;
}

int cmd_symmetry_check(const EnsembleFlags& flags, const std::string& out) {
  const EnsembleConfig cfg = flags.resolve();
  if (cfg.spec.sites > 7) throw ConfigError("sites", "exact diagonalization supports at most 7 sites (14 modes)");
  const EdEnsemble ens = build_ed_ensemble(cfg.spec, cfg.orbit_average);
  const DensityMatrixED& rho = *ens.rho;
  const SymmetryOpED charge = edge_charge_op(ens.space, cfg.charge_angle);
  const SymmetryOpED dipole = edge_dipole_op(ens.space, cfg.dipole_angle);
  json rep{{"version", MSLAB_VERSION},
           {"config", to_json(cfg.spec)},
           {"orbit_average", cfg.orbit_average},
           {"charge_angle", cfg.charge_angle},
           {"dipole_angle", cfg.dipole_angle},
           {"members", ens.members},
           {"strong", to_json(strong_symmetry_check(rho, charge))},
           {"weak", to_json(weak_symmetry_check(rho, charge))},
           {"strong_dipole", to_json(strong_symmetry_check(rho, dipole))},
           {"weak_dipole", to_json(weak_symmetry_check(rho, dipole))},
           {"purity", rho.purity()}};
  json sectors = json::array();
  for (const auto& s : charge_sectors(rho, ens.space)) sectors.push_back({{"charge", s.charge}, {"weight", s.weight}});
  rep["charge_sectors"] = sectors;
  std::ostringstream line;
  line << "symmetry-check N=" << cfg.spec.sites << ": strong " << (rep["strong"]["pass"].get<bool>() ? "pass" : "fail")
       << ", weak " << (rep["weak"]["pass"].get<bool>() ? "pass" : "fail") << ", " << sectors.size() << " charge sectors";
  if (emit(out, "symmetry_check.json", pretty(rep)))
    std::cout << line.str() << "\n";
  else
    std::cout << pretty(rep);
  return kOk;
}

int cmd_verify_all(std::uint64_t seed, const std::string& out) {
  const AcceptanceRun first = run_acceptance(seed);
  const AcceptanceRun second = run_acceptance(seed);
  const std::string a = results_json(first).dump(2);
  const std::string b = results_json(second).dump(2);
  AcceptanceRun run = first;
  run.results.push_back(determinism_criterion(a, b));
  for (const auto& r : run.results) std::cout << format_line(r) << "\n";
  for (const auto& r : run.properties) std::cout << "[" << (r.passed ? "PASS" : "FAIL") << "] " << r.name << ": " << r.summary << "\n";
  if (!out.empty()) {
    emit(out, "results.json", pretty(results_json(run)));
    json info = run_info_json(run);
    json second_times = run_info_json(second)["seconds"];
    info["seconds_repeat"] = second_times;
    emit(out, "run_info.json", pretty(info));
  }
  std::cout << (run.all_passed() ? "all criteria passed" : "acceptance FAILED") << "\n";
  return run.all_passed() ? kOk : kMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled-wire and mixed-state edge laboratory"};
  app.set_version_flag("--version", MSLAB_VERSION);
  app.require_subcommand(1);

  std::string out;

  auto* gap = app.add_subcommand("gap-scan", "Enumerate symmetric vertex vectors and a maximal gapping set");
  std::string block, gap_file;
  std::optional<std::int64_t> bound;
  gap->add_option("--block", block, "Preset block: " + [] {
    std::string s;
    for (const auto& n : blocks::names()) s += (s.empty() ? "" : ", ") + n;
    return s;
  }());
  gap->add_option("--file", gap_file, "Block config (JSON)");
  gap->add_option("--bound", bound, "Coefficient bound");
  gap->add_option("--out", out, "Output directory");

  auto* anom = app.add_subcommand("anomaly", "Anomaly matrix, flux insertion and realizability verdicts");
  std::string scen, anom_file;
  anom->add_option("--scenario", scen, "Catalog scenario");
  anom->add_option("--file", anom_file, "Channel-set config (JSON)");
  anom->add_option("--out", out, "Output directory");

  auto* flow = app.add_subcommand("spectral-flow", "Charge pumped by mass-phase winding");
  Index flow_n = 64;
  double flow_m = 0.5, flow_b = 1.0, flow_v = 1.0;
  int flow_w = 1;
  flow->add_option("--n", flow_n, "Ring sites")->capture_default_str();
  flow->add_option("--m", flow_m, "Mass magnitude")->capture_default_str();
  flow->add_option("--w", flow_w, "Largest winding (rows run from 0 to w)")->capture_default_str();
  flow->add_option("--wilson", flow_b, "Wilson coupling")->capture_default_str();
  flow->add_option("--velocity", flow_v, "Velocity")->capture_default_str();
  flow->add_option("--out", out, "Output directory");

  auto* corr = app.add_subcommand("edge-corr", "Linear and Renyi-2 correlators of the disorder ensemble");
  EnsembleFlags corr_flags;
  corr_flags.attach(corr);
  std::string op = "all";
  corr->add_option("--operator", op, "G, S, renyi2 or all")
      ->check(CLI::IsMember({"G", "S", "renyi2", "all"}))
      ->capture_default_str();
  corr->add_option("--out", out, "Output directory");

  auto* sym = app.add_subcommand("symmetry-check", "Strong and weak symmetry of a small-ring ensemble (exact)");
  EnsembleFlags sym_flags;
  sym_flags.attach(sym);
  sym->add_option("--out", out, "Output directory");

  auto* all = app.add_subcommand("verify-all", "Run the acceptance suite");
  std::uint64_t verify_seed = 0;
  all->add_option("--seed", verify_seed, "Root seed")->required();
  all->add_option("--out", out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*gap) return cmd_gap_scan(block, gap_file, bound, out);
    if (*anom) return cmd_anomaly(scen, anom_file, out);
    if (*flow) return cmd_spectral_flow(flow_n, flow_m, flow_w, flow_b, flow_v, out);
    if (*corr) return cmd_edge_corr(corr_flags, op, out);
    if (*sym) return cmd_symmetry_check(sym_flags, out);
    if (*all) return cmd_verify_all(verify_seed, out);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n" << app.help();
    return kConfig;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kConfig;
  } catch (const PreconditionError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kMismatch;
  }
  return kConfig;
}
