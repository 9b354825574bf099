#include "mslab/anomaly_ledger.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "mslab/errors.hpp"
#include "mslab/integer_lattice.hpp"

namespace mslab {

using lattice::checked_add;
using lattice::checked_mul;

std::int64_t AnomalyMatrix::at(const std::string& g, const std::string& h) const {
  auto find = [&](const std::string& n) {
    auto it = std::find(generators.begin(), generators.end(), n);
    if (it == generators.end()) throw LookupError("unknown generator '" + n + "'");
    return static_cast<Index>(it - generators.begin());
  };
  return entries(find(g), find(h));
}

namespace {

std::vector<std::string> generator_names(const ChannelSet& set) {
  std::vector<std::string> out;
  for (const auto& g : set.generators()) out.push_back(g.name);
  return out;
}

// Modulation values f_g(x_c), rows = generators, columns = channels.
IntMatrix modulation_table(const ChannelSet& set, const std::vector<SymmetryGenerator>& gens) {
  IntMatrix f(static_cast<Index>(gens.size()), set.size());
  for (std::size_t g = 0; g < gens.size(); ++g)
    for (Index c = 0; c < set.size(); ++c)
      f(static_cast<Index>(g), c) = evaluate(gens[g].modulation, set.modes()[static_cast<std::size_t>(c)].position);
  return f;
}

AnomalyMatrix accumulate(const ChannelSet& set, const std::vector<SymmetryGenerator>& gens,
                         const std::vector<Index>& members) {
  const IntMatrix f = modulation_table(set, gens);
  const Index ng = static_cast<Index>(gens.size());
  AnomalyMatrix a{generator_names(set), IntMatrix::Zero(ng, ng)};
  for (Index c : members) {
    const auto& m = set.modes()[static_cast<std::size_t>(c)];
    const std::int64_t w = checked_mul(sign(m.chirality), checked_mul(m.base_charge, m.base_charge));
    for (Index g = 0; g < ng; ++g)
      for (Index h = 0; h < ng; ++h)
        a.entries(g, h) = checked_add(a.entries(g, h), checked_mul(w, checked_mul(f(g, c), f(h, c))));
  }
  return a;
}

std::vector<Index> all_members(const ChannelSet& set) {
  std::vector<Index> out(static_cast<std::size_t>(set.size()));
  for (Index i = 0; i < set.size(); ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

void validate(const ChannelSet& set) {
  if (set.size() == 0) throw PreconditionError("channel set is empty");
  if (set.generators().empty()) throw PreconditionError("channel set declares no generators");
}

std::vector<SymmetryGenerator> localized(const ChannelSet& set, const std::vector<Index>& members) {
  auto gens = set.generators();
  for (auto& g : gens) {
    if (auto* p = std::get_if<Polynomial>(&g.modulation)) {
      std::int64_t origin = std::numeric_limits<std::int64_t>::max();
      for (Index c : members)
        origin = std::min(origin, set.modes()[static_cast<std::size_t>(c)].position.coord(p->axis));
      g.modulation = shift_origin(*p, origin);
    }
  }
  return gens;
}

}  // namespace

AnomalyMatrix anomaly_matrix(const ChannelSet& set) {
  validate(set);
  return accumulate(set, set.generators(), all_members(set));
}

AnomalyMatrix anomaly_matrix(const ChannelSet& set, const std::string& region) {
  validate(set);
  return accumulate(set, set.generators(), set.region_members(region));
}

AnomalyMatrix anomaly_matrix_local(const ChannelSet& set, const std::string& region) {
  validate(set);
  const auto members = set.region_members(region);
  return accumulate(set, localized(set, members), members);
}

FluxReport flux_insertion(const ChannelSet& set, const std::string& generator) {
  validate(set);
  const Index gi = set.generator_index(generator);
  const auto& gens = set.generators();
  const IntMatrix f = modulation_table(set, gens);
  const Index ng = static_cast<Index>(gens.size());

  FluxReport r;
  r.generator = generator;
  r.responders = generator_names(set);
  r.occupation_shifts = IntVector::Zero(set.size());
  r.totals = IntVector::Zero(ng);
  for (Index c = 0; c < set.size(); ++c) {
    const auto& m = set.modes()[static_cast<std::size_t>(c)];
    r.channel_ids.push_back(m.id);
    r.occupation_shifts(c) = checked_mul(sign(m.chirality), checked_mul(m.base_charge, f(gi, c)));
  }
  auto region_change = [&](const std::vector<Index>& members, const IntMatrix& table) {
    IntVector out = IntVector::Zero(ng);
    for (Index c : members) {
      const auto q = set.modes()[static_cast<std::size_t>(c)].base_charge;
      for (Index h = 0; h < ng; ++h)
        out(h) = checked_add(out(h), checked_mul(r.occupation_shifts(c), checked_mul(q, table(h, c))));
    }
    return out;
  };
  r.totals = region_change(all_members(set), f);
  for (const auto& label : set.region_labels()) {
    const auto members = set.region_members(label);
    r.per_region[label] = region_change(members, f);
    r.per_region_local[label] = region_change(members, modulation_table(set, localized(set, members)));
  }
  return r;
}

Verdict realizability(const ChannelSet& set) {
  const AnomalyMatrix a = anomaly_matrix(set);
  const auto& gens = set.generators();
  Verdict v;
  for (Index g = 0; g < a.entries.rows(); ++g) {
    for (Index h = g; h < a.entries.cols(); ++h) {
      const std::int64_t value = a.entries(g, h);
      if (value == 0) continue;
      const auto& gg = gens[static_cast<std::size_t>(g)];
      const auto& hh = gens[static_cast<std::size_t>(h)];
      Violation x;
      x.g = gg.name;
      x.h = hh.name;
      x.value = value;
      x.ancilla_absorbed = gg.strength == Strength::Weak && hh.strength == Strength::Weak;
      std::ostringstream os;
      os << "unit " << gg.name << "-flux pumps " << value << " units of " << hh.name
         << "-charge into the bulk";
      if (x.ancilla_absorbed)
        os << "; both generators are weak, so the open system can absorb it in the ancillae";
      else
        os << "; " << (gg.strength == Strength::Strong ? gg.name : hh.name)
           << " is strong, so no ancilla can compensate";
      x.explanation = os.str();
      v.closed_realizable = false;
      if (!x.ancilla_absorbed) v.open_realizable = false;
      v.violations.push_back(std::move(x));
    }
  }
  return v;
}

namespace {

// Degree n if the modulation is exactly x^n (unit coefficient), else -1.
int monomial_degree(const Modulation& f) {
  const auto* p = std::get_if<Polynomial>(&f);
  if (!p || p->axis != Axis::X) return -1;
  int deg = -1;
  for (std::size_t k = 0; k < p->coeffs.size(); ++k) {
    if (p->coeffs[k] == 0) continue;
    if (deg >= 0 || p->coeffs[k] != 1) return -1;
    deg = static_cast<int>(k);
  }
  return deg;
}

}  // namespace

HierarchyReport multipole_hierarchy(const ChannelSet& set, const std::string& edge_region) {
  std::map<int, std::string> by_degree;
  for (const auto& g : set.generators()) {
    const int d = monomial_degree(g.modulation);
    if (d >= 0) by_degree.emplace(d, g.name);
  }
  if (by_degree.empty()) throw PreconditionError("no monomial generators x^k in the channel set");
  const int n = by_degree.rbegin()->first;
  for (int k = 0; k <= n; ++k)
    if (!by_degree.count(k)) throw PreconditionError("monomial generators must cover x^0 .. x^" + std::to_string(n));
  if (n < 1) throw PreconditionError("multipole hierarchy needs at least the dipole generator");

  const AnomalyMatrix total = anomaly_matrix(set);
  const AnomalyMatrix edge = anomaly_matrix(set, edge_region);
  HierarchyReport r;
  r.order = n;
  r.edge_mixed = edge.at(by_degree[n], by_degree[n - 1]);
  r.lower_cancel = true;
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b)
      if (a + b < 2 * n && total.at(by_degree[a], by_degree[b]) != 0) r.lower_cancel = false;
  r.top_self_total = total.at(by_degree[n], by_degree[n]);
  r.forced_self_anomaly = r.edge_mixed != 0 && r.lower_cancel && r.top_self_total != 0;
  return r;
}

namespace {

ChiralMode channel(std::string id, std::int64_t x, Chirality c) {
  return {std::move(id), Position::at(x), c, "", 1};
}

ChiralMode hinge(std::string id, std::int64_t x, std::int64_t y, Chirality c) {
  return {std::move(id), Position::at(x, y), c, "", 1};
}

SymmetryGenerator gen(std::string name, Modulation f, Strength s) { return {std::move(name), std::move(f), s}; }

ChannelSet tdi_edges(Strength dipole) {
  return ChannelSet({channel("left.R@0", 0, Chirality::Right), channel("left.L@1", 1, Chirality::Left),
                     channel("right.L@3", 3, Chirality::Left), channel("right.R@4", 4, Chirality::Right)},
                    {gen("e", constant_modulation(), Strength::Strong), gen("d", monomial(1), dipole)},
                    {{"left.R@0", "left-edge"},
                     {"left.L@1", "left-edge"},
                     {"right.L@3", "right-edge"},
                     {"right.R@4", "right-edge"}});
}

ChannelSet chiral_pair(std::vector<SymmetryGenerator> gens) {
  return ChannelSet({channel("left.R@0", 0, Chirality::Right), channel("right.L@4", 4, Chirality::Left)},
                    std::move(gens), {{"left.R@0", "left-edge"}, {"right.L@4", "right-edge"}});
}

ChannelSet hoti_hinges(Strength planes) {
  const std::int64_t L = 3;
  std::vector<SymmetryGenerator> gens{gen("U", constant_modulation(), Strength::Strong)};
  for (std::int64_t y = 0; y <= L; ++y)
    gens.push_back(gen("xz@y=" + std::to_string(y), PlaneIndicator{Axis::Y, y}, planes));
  for (std::int64_t x = 0; x <= L; ++x)
    gens.push_back(gen("yz@x=" + std::to_string(x), PlaneIndicator{Axis::X, x}, planes));
  return ChannelSet({hinge("psi1_L(0,0)", 0, 0, Chirality::Left), hinge("psi2_R(0,3)", 0, L, Chirality::Right),
                     hinge("psi3_R(3,0)", L, 0, Chirality::Right), hinge("psi4_L(3,3)", L, L, Chirality::Left)},
                    std::move(gens),
                    {{"psi1_L(0,0)", "hinge-1"},
                     {"psi2_R(0,3)", "hinge-2"},
                     {"psi3_R(3,0)", "hinge-3"},
                     {"psi4_L(3,3)", "hinge-4"}});
}

}  // namespace

ChannelSet multipole_channels(int n) {
  if (n < 1) throw PreconditionError("multipole order must be >= 1");
  const std::int64_t width = 2 * n;
  const std::int64_t L = 2 * n + 1;
  std::vector<ChiralMode> modes;
  std::map<std::string, std::string> regions;
  std::int64_t binom = 1;  // C(2n-1, j)
  for (std::int64_t j = 0; j < width; ++j) {
    const Chirality left = (j % 2 == 0) ? Chirality::Right : Chirality::Left;
    const Chirality right = left == Chirality::Right ? Chirality::Left : Chirality::Right;
    for (std::int64_t k = 0; k < binom; ++k) {
      const std::string suffix = std::to_string(j) + "." + std::to_string(k);
      modes.push_back(channel("left@" + suffix, j, left));
      regions["left@" + suffix] = "left-edge";
      modes.push_back(channel("right@" + suffix, j + L, right));
      regions["right@" + suffix] = "right-edge";
    }
    binom = binom * (width - 1 - j) / (j + 1);
  }
  std::vector<SymmetryGenerator> gens;
  for (int k = 0; k <= n; ++k)
    gens.push_back(gen(k == 0 ? "x^0" : (k == 1 ? "x" : "x^" + std::to_string(k)), monomial(k), Strength::Strong));
  return ChannelSet(std::move(modes), std::move(gens), std::move(regions));
}

std::vector<std::string> scenario_names() {
  return {"tdi-closed", "tdi-open",     "charge-self-open", "hoti-closed",
          "hoti-open",  "multipole-n2", "multipole-n3",     "qhe-closed"};
}

Scenario scenario(const std::string& name) {
  Scenario s;
  s.name = name;
  if (name == "tdi-closed") {
    s.description = "TDI edges at x=0,1 and x=3,4; charge and dipole both strong";
    s.channels = tdi_edges(Strength::Strong);
  } else if (name == "tdi-open") {
    s.description = "TDI edges at x=0,1 and x=3,4; charge strong, dipole weak";
    s.channels = tdi_edges(Strength::Weak);
    s.expect_open = true;
  } else if (name == "charge-self-open") {
    s.description = "single chiral channel per edge (R at x=0, L at x=4); charge strong, dipole weak";
    s.channels = chiral_pair({gen("e", constant_modulation(), Strength::Strong), gen("d", monomial(1), Strength::Weak)});
  } else if (name == "hoti-closed") {
    s.description = "four hinge channels on a 3x3 cross-section; global and plane charges all strong";
    s.channels = hoti_hinges(Strength::Strong);
  } else if (name == "hoti-open") {
    s.description = "four hinge channels on a 3x3 cross-section; global charge strong, plane charges weak";
    s.channels = hoti_hinges(Strength::Weak);
    s.expect_open = true;
  } else if (name == "multipole-n2" || name == "multipole-n3") {
    const int n = name.back() - '0';
    s.description = "binomial-weighted edges with generators x^0..x^" + std::to_string(n) +
                    ", all strong; per-edge mixed x^" + std::to_string(n) + "-x^" + std::to_string(n - 1) +
                    " anomaly";
    s.channels = multipole_channels(n);
    s.expect_forced = true;
    s.edge_region = "left-edge";
  } else if (name == "qhe-closed") {
    s.description = "quantum Hall edge pair (R at x=0, L at x=4) with charge only";
    s.channels = chiral_pair({gen("e", constant_modulation(), Strength::Strong)});
    s.expect_closed = true;
    s.expect_open = true;
  } else {
    throw LookupError("unknown scenario '" + name + "'");
  }
  return s;
}

}  // namespace mslab
