#include "mslab/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace mslab {

using nlohmann::json;

json to_json(const IntVector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const IntMatrix& m) {
  json out = json::array();
  for (Index i = 0; i < m.rows(); ++i) out.push_back(to_json(IntVector(m.row(i).transpose())));
  return out;
}

json to_json(const Modulation& f) {
  json out;
  if (const auto* p = std::get_if<Polynomial>(&f)) {
    out["type"] = "polynomial";
    out["axis"] = p->axis == Axis::X ? "x" : "y";
    out["coeffs"] = p->coeffs;
  } else if (const auto* q = std::get_if<PlaneIndicator>(&f)) {
    out["type"] = "plane";
    out["axis"] = q->axis == Axis::X ? "x" : "y";
    out["value"] = q->value;
  } else {
    out["type"] = "table";
    out["entries"] = json::array();
    for (const auto& [xy, v] : std::get<Tabulated>(f).table)
      out["entries"].push_back({{"x", xy.first}, {"y", xy.second}, {"value", v}});
  }
  out["text"] = describe(f);
  return out;
}

json to_json(const WireArray& a) {
  json modes = json::array();
  for (const auto& m : a.modes()) {
    json j{{"id", m.id}, {"x", m.position.x}, {"chirality", m.chirality == Chirality::Right ? "R" : "L"},
           {"flavor", m.flavor}, {"charge", m.base_charge}};
    if (m.position.dims > 1) j["y"] = m.position.y;
    modes.push_back(std::move(j));
  }
  json gens = json::array();
  for (const auto& g : a.generators())
    gens.push_back({{"name", g.name}, {"modulation", to_json(g.modulation)}, {"strength", to_string(g.strength)}});
  return {{"modes", modes}, {"generators", gens}, {"regions", a.regions()}};
}

json gap_scan_record(const std::string& block, const WireArray& array, const VertexEnumeration& en,
                     const GappingResult& gap) {
  json vertices = json::array();
  for (const auto& v : gap.vertices) vertices.push_back(to_json(v));
  json ids = json::array();
  for (const auto& m : array.modes()) ids.push_back(m.id);
  return {{"block", block},
          {"modes", ids},
          {"bound", en.bound},
          {"basis", to_json(en.gapping_basis)},
          {"rank", en.gapping_rank()},
          {"symmetric_basis", to_json(en.symmetric_basis)},
          {"symmetric_rank", en.symmetric_rank()},
          {"kernel_rank", en.kernel_rank},
          {"saturated", en.saturated},
          {"solution_count", en.solution_count},
          {"truncated", en.truncated},
          {"vertices", vertices},
          {"fully_gapped", gap.fully_gapped},
          {"exhaustive", gap.exhaustive}};
}

json to_json(const AnomalyMatrix& a) { return {{"generators", a.generators}, {"entries", to_json(a.entries)}}; }

json to_json(const FluxReport& f) {
  json per_region = json::object();
  for (const auto& [label, v] : f.per_region)
    per_region[label] = {{"global", to_json(v)}, {"local", to_json(f.per_region_local.at(label))}};
  return {{"generator", f.generator},
          {"channels", f.channel_ids},
          {"occupation_shifts", to_json(f.occupation_shifts)},
          {"responders", f.responders},
          {"per_region", per_region},
          {"totals", to_json(f.totals)}};
}

json to_json(const Verdict& v) {
  json violations = json::array();
  for (const auto& x : v.violations)
    violations.push_back({{"g", x.g},
                          {"h", x.h},
                          {"value", x.value},
                          {"ancilla_absorbed", x.ancilla_absorbed},
                          {"explanation", x.explanation}});
  return {{"closed_realizable", v.closed_realizable}, {"open_realizable", v.open_realizable}, {"violations", violations}};
}

json to_json(const HierarchyReport& h) {
  return {{"order", h.order},
          {"edge_mixed", h.edge_mixed},
          {"lower_cancel", h.lower_cancel},
          {"top_self_total", h.top_self_total},
          {"forced_self_anomaly", h.forced_self_anomaly}};
}

json anomaly_report(const ChannelSet& set) {
  json out;
  out["matrix"] = to_json(anomaly_matrix(set));
  json per_region = json::object();
  for (const auto& label : set.region_labels())
    per_region[label] = {{"global", to_json(anomaly_matrix(set, label))},
                         {"local", to_json(anomaly_matrix_local(set, label))}};
  out["per_region"] = per_region;
  json flux = json::object();
  for (const auto& g : set.generators()) flux[g.name] = to_json(flux_insertion(set, g.name));
  out["flux"] = flux;
  const json verdict = to_json(realizability(set));
  out.update(verdict);
  return out;
}

json to_json(const FitRecord& f) {
  return {{"model", to_string(f.model)},
          {"exponent", f.exponent},
          {"length", std::isfinite(f.length) ? json(f.length) : json(nullptr)},
          {"r2_power", f.r2_power},
          {"r2_exponential", f.r2_exponential},
          {"margin", f.margin},
          {"window", {f.window_min, f.window_max}},
          {"bins_used", f.bins_used}};
}

json to_json(const EnsembleSpec& s) {
  return {{"sites", s.sites},
          {"samples", s.samples},
          {"seed", s.seed},
          {"mass", s.mass},
          {"stiffness", s.stiffness},
          {"winding", {{"sectors", s.winding.windings}, {"probabilities", s.winding.probabilities}}},
          {"wilson", s.wilson},
          {"velocity", s.velocity},
          {"pair_budget", s.pair_budget},
          {"fit_min", s.fit_min},
          {"fit_max", s.fit_upper()}};
}

json correlator_summary(const CorrelatorEstimate& e) {
  json out;
  if (e.fit) {
    out["fit_model"] = to_string(e.fit->model);
    const double v = e.fit->exponent_or_length();
    out["exponent_or_length"] = std::isfinite(v) ? json(v) : json(nullptr);
    out["r2"] = e.fit->r2();
    out["margin"] = e.fit->margin;
    out["fit"] = to_json(*e.fit);
  } else {
    out["fit_model"] = nullptr;
    out["exponent_or_length"] = nullptr;
    out["r2"] = nullptr;
    out["margin"] = nullptr;
    out["fit_error"] = e.fit_error;
  }
  out["n_valid_samples"] = e.n_valid;
  out["n_rejected_samples"] = e.n_rejected;
  return out;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_correlator_csv(std::ostream& os, const CorrelatorEstimate& e) {
  os << "distance,mean_re,mean_im,stderr\n";
  for (std::size_t i = 0; i < e.distances.size(); ++i)
    os << e.distances[i] << "," << format_double(e.values[i].real()) << "," << format_double(e.values[i].imag()) << ","
       << format_double(e.stderrs[i]) << "\n";
}

void write_spectral_flow_csv(std::ostream& os, const std::vector<SpectralFlowRow>& rows) {
  os << "winding,particles,delta_q,gap\n";
  for (const auto& r : rows)
    os << r.winding << "," << r.particles << "," << r.delta_charge << "," << format_double(r.gap) << "\n";
}

json to_json(const SymmetryCheck& c) {
  json out{{"pass", c.pass}, {"residual", c.residual}};
  if (!c.diagnostic.empty()) out["diagnostic"] = c.diagnostic;
  return out;
}

}  // namespace mslab
