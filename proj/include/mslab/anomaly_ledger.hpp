#ifndef MSLAB_ANOMALY_LEDGER_HPP
#define MSLAB_ANOMALY_LEDGER_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mslab/types.hpp"
#include "mslab/wire_algebra.hpp"

namespace mslab {

// Gapless boundary content plus its generators. Same representation as a
// wire block; the region labels name the boundaries.
using ChannelSet = WireArray;

// A[g,h] = sum_c chirality_c * q_c^2 * f_g(x_c) * f_h(x_c): the h-charge
// pumped per unit g-flux. Exact integers, symmetric.
struct AnomalyMatrix {
  std::vector<std::string> generators;
  IntMatrix entries;

  std::int64_t at(const std::string& g, const std::string& h) const;
  bool is_zero() const { return entries.isZero(); }
};

AnomalyMatrix anomaly_matrix(const ChannelSet& set);
// Restricted to the channels carrying `region`.
AnomalyMatrix anomaly_matrix(const ChannelSet& set, const std::string& region);
// Restricted to `region`, with polynomial modulations re-centred at the
// region's smallest coordinate along their axis (edge-local origin).
AnomalyMatrix anomaly_matrix_local(const ChannelSet& set, const std::string& region);

// Charge pumped by a unit flux of one generator.
struct FluxReport {
  std::string generator;
  std::vector<std::string> channel_ids;
  IntVector occupation_shifts;  // dn_c = chirality_c * q_c * f_g(x_c)
  std::vector<std::string> responders;  // generator names h, matrix column order
  std::map<std::string, IntVector> per_region;
  // Per-region changes with polynomial modulations re-centred at each
  // region's own origin.
  std::map<std::string, IntVector> per_region_local;
  IntVector totals;
};

FluxReport flux_insertion(const ChannelSet& set, const std::string& generator);

struct Violation {
  std::string g;
  std::string h;
  std::int64_t value = 0;
  // Both generators weak: the closed rule fails but the open rule tolerates it.
  bool ancilla_absorbed = false;
  std::string explanation;
};

struct Verdict {
  bool closed_realizable = true;
  bool open_realizable = true;
  std::vector<Violation> violations;  // every nonzero entry with g <= h
};

Verdict realizability(const ChannelSet& set);

// Multipole bookkeeping for sets whose generators include the monomials
// x^0 .. x^n. Reads the per-edge mixed anomaly A_edge[x^n, x^(n-1)], checks
// that every total with lower combined degree cancels, and reports whether
// the top self-anomaly total A[x^n, x^n] is then forced to be nonzero.
struct HierarchyReport {
  int order = 0;
  std::int64_t edge_mixed = 0;
  bool lower_cancel = false;
  std::int64_t top_self_total = 0;
  bool forced_self_anomaly = false;
};

HierarchyReport multipole_hierarchy(const ChannelSet& set, const std::string& edge_region);

struct Scenario {
  std::string name;
  std::string description;
  ChannelSet channels;
  bool expect_closed = false;
  bool expect_open = false;
  std::optional<bool> expect_forced;
  std::string edge_region;  // used by multipole scenarios
};

Scenario scenario(const std::string& name);
std::vector<std::string> scenario_names();

// The multipole-n channel content: on the left edge, (-1)^j C(2n-1, j)
// unit channels at x = j (signed count, sign = chirality); the right edge is
// the chirality-reversed copy translated by L = 2n + 1.
ChannelSet multipole_channels(int n);

}  // namespace mslab

#endif  // MSLAB_ANOMALY_LEDGER_HPP
