#include "mslab/wire_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "mslab/errors.hpp"
#include "mslab/integer_lattice.hpp"

namespace mslab {

using lattice::checked_add;
using lattice::checked_mul;

std::int64_t Position::coord(Axis a) const {
  if (a == Axis::X) return x;
  if (dims < 2) throw PreconditionError("y-axis modulation evaluated on a 1D position");
  return y;
}

namespace {

std::int64_t ipow(std::int64_t base, std::size_t k) {
  std::int64_t r = 1;
  for (std::size_t i = 0; i < k; ++i) r = checked_mul(r, base);
  return r;
}

std::int64_t binomial(std::int64_t n, std::int64_t k) {
  std::int64_t r = 1;
  for (std::int64_t i = 1; i <= k; ++i) r = checked_mul(r, n - k + i) / i;
  return r;
}

const char* axis_name(Axis a) { return a == Axis::X ? "x" : "y"; }

}  // namespace

std::int64_t evaluate(const Modulation& f, const Position& r) {
  if (const auto* p = std::get_if<Polynomial>(&f)) {
    const std::int64_t t = r.coord(p->axis);
    std::int64_t acc = 0;
    for (std::size_t k = p->coeffs.size(); k-- > 0;) acc = checked_add(checked_mul(acc, t), p->coeffs[k]);
    return acc;
  }
  if (const auto* q = std::get_if<PlaneIndicator>(&f)) return r.coord(q->axis) == q->value ? 1 : 0;
  const auto& t = std::get<Tabulated>(f).table;
  auto it = t.find({r.x, r.dims > 1 ? r.y : 0});
  return it == t.end() ? 0 : it->second;
}

Polynomial shift_origin(const Polynomial& p, std::int64_t r0) {
  Polynomial out{p.axis, std::vector<std::int64_t>(p.coeffs.size(), 0)};
  for (std::size_t k = 0; k < p.coeffs.size(); ++k) {
    for (std::size_t j = 0; j <= k; ++j) {
      const std::int64_t term =
          checked_mul(checked_mul(p.coeffs[k], binomial(static_cast<std::int64_t>(k), static_cast<std::int64_t>(j))),
                      ipow(-r0, k - j));
      out.coeffs[j] = checked_add(out.coeffs[j], term);
    }
  }
  return out;
}

Polynomial monomial(int n, Axis axis) {
  Polynomial p{axis, std::vector<std::int64_t>(static_cast<std::size_t>(n) + 1, 0)};
  p.coeffs.back() = 1;
  return p;
}

std::string describe(const Modulation& f) {
  std::ostringstream os;
  if (const auto* p = std::get_if<Polynomial>(&f)) {
    bool first = true;
    for (std::size_t k = 0; k < p->coeffs.size(); ++k) {
      const std::int64_t c = p->coeffs[k];
      if (c == 0) continue;
      if (!first) os << (c < 0 ? " - " : " + ");
      else if (c < 0) os << "-";
      const std::int64_t a = c < 0 ? -c : c;
      if (k == 0 || a != 1) os << a;
      if (k > 0) os << axis_name(p->axis);
      if (k > 1) os << "^" << k;
      first = false;
    }
    if (first) os << "0";
  } else if (const auto* q = std::get_if<PlaneIndicator>(&f)) {
    os << "plane(" << axis_name(q->axis) << "=" << q->value << ")";
  } else {
    os << "table[" << std::get<Tabulated>(f).table.size() << "]";
  }
  return os.str();
}

std::string to_string(Strength s) { return s == Strength::Strong ? "strong" : "weak"; }

WireArray::WireArray(std::vector<ChiralMode> modes, std::vector<SymmetryGenerator> generators,
                     std::map<std::string, std::string> regions)
    : modes_(std::move(modes)), generators_(std::move(generators)), regions_(std::move(regions)) {
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const auto& m = modes_[i];
    if (m.base_charge == 0) throw PreconditionError("mode '" + m.id + "' has zero base charge");
    const int c = static_cast<int>(m.chirality);
    if (c != 1 && c != -1) throw PreconditionError("mode '" + m.id + "' has chirality outside {+1,-1}");
    if (!index_.emplace(m.id, static_cast<Index>(i)).second)
      throw PreconditionError("duplicate mode id '" + m.id + "'");
  }
  std::set<std::string> names;
  for (const auto& g : generators_)
    if (!names.insert(g.name).second) throw PreconditionError("duplicate generator name '" + g.name + "'");
  for (const auto& [id, label] : regions_) {
    if (!index_.count(id)) throw PreconditionError("region map names unknown mode '" + id + "'");
    if (label.empty()) throw PreconditionError("empty region label for mode '" + id + "'");
  }
}

Index WireArray::index_of(const std::string& mode_id) const {
  auto it = index_.find(mode_id);
  if (it == index_.end()) throw LookupError("unknown mode id '" + mode_id + "'");
  return it->second;
}

Index WireArray::generator_index(const std::string& name) const {
  for (std::size_t i = 0; i < generators_.size(); ++i)
    if (generators_[i].name == name) return static_cast<Index>(i);
  throw LookupError("unknown generator '" + name + "'");
}

const SymmetryGenerator& WireArray::generator(const std::string& name) const {
  return generators_[static_cast<std::size_t>(generator_index(name))];
}

std::string WireArray::region_of(Index mode) const {
  auto it = regions_.find(modes_[static_cast<std::size_t>(mode)].id);
  return it == regions_.end() ? "unassigned" : it->second;
}

std::vector<std::string> WireArray::region_labels() const {
  std::set<std::string> labels;
  if (regions_.empty()) return {};
  for (Index i = 0; i < size(); ++i) labels.insert(region_of(i));
  return {labels.begin(), labels.end()};
}

std::vector<Index> WireArray::region_members(const std::string& label) const {
  std::vector<Index> out;
  for (Index i = 0; i < size(); ++i)
    if (region_of(i) == label) out.push_back(i);
  if (out.empty()) throw LookupError("unknown region '" + label + "'");
  return out;
}

WireArray WireArray::with_generators(std::vector<SymmetryGenerator> generators) const {
  return WireArray(modes_, std::move(generators), regions_);
}

WireArray WireArray::disjoint_union(const WireArray& other) const {
  auto modes = modes_;
  modes.insert(modes.end(), other.modes_.begin(), other.modes_.end());
  auto regions = regions_;
  for (const auto& kv : other.regions_) regions.insert(kv);
  return WireArray(std::move(modes), generators_, std::move(regions));
}

bool VertexVector::is_zero() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](const auto& kv) { return kv.second == 0; });
}

VertexVector VertexVector::from_dense(const WireArray& array, const IntVector& v) {
  if (v.size() != array.size()) throw PreconditionError("dense vertex length does not match the array");
  VertexVector out;
  for (Index j = 0; j < v.size(); ++j)
    if (v(j) != 0) out.coeffs[array.modes()[static_cast<std::size_t>(j)].id] = v(j);
  return out;
}

IntVector dense(const VertexVector& v, const WireArray& array) {
  IntVector out = IntVector::Zero(array.size());
  for (const auto& [id, c] : v.coeffs) out(array.index_of(id)) = c;
  return out;
}

std::int64_t charge_of(const IntVector& v, const SymmetryGenerator& g, const WireArray& array) {
  if (v.size() != array.size()) throw PreconditionError("vertex length does not match the array");
  std::int64_t acc = 0;
  for (Index j = 0; j < v.size(); ++j) {
    if (v(j) == 0) continue;
    const auto& m = array.modes()[static_cast<std::size_t>(j)];
    acc = checked_add(acc, checked_mul(checked_mul(v(j), m.base_charge), evaluate(g.modulation, m.position)));
  }
  return acc;
}

std::int64_t null_pairing(const IntVector& v1, const IntVector& v2, const WireArray& array) {
  if (v1.size() != array.size() || v2.size() != array.size())
    throw PreconditionError("vertex length does not match the array");
  std::int64_t acc = 0;
  for (Index j = 0; j < v1.size(); ++j)
    acc = checked_add(acc, checked_mul(sign(array.modes()[static_cast<std::size_t>(j)].chirality),
                                       checked_mul(v1(j), v2(j))));
  return acc;
}

std::int64_t charge_of(const VertexVector& v, const SymmetryGenerator& g, const WireArray& array) {
  return charge_of(dense(v, array), g, array);
}

std::int64_t null_pairing(const VertexVector& v1, const VertexVector& v2, const WireArray& array) {
  return null_pairing(dense(v1, array), dense(v2, array), array);
}

IntMatrix constraint_matrix(const WireArray& array) {
  const auto& gens = array.generators();
  IntMatrix c(static_cast<Index>(gens.size()), array.size());
  for (std::size_t g = 0; g < gens.size(); ++g)
    for (Index j = 0; j < array.size(); ++j) {
      const auto& m = array.modes()[static_cast<std::size_t>(j)];
      c(static_cast<Index>(g), j) = checked_mul(m.base_charge, evaluate(gens[g].modulation, m.position));
    }
  return c;
}

namespace {

// Appends v to the span if it is new; keeps the basis in Hermite form.
void grow_span(IntMatrix& basis, const IntVector& v) {
  if (lattice::in_span(basis, v)) return;
  IntMatrix next(basis.rows() + 1, v.size());
  next.topRows(basis.rows()) = basis;
  next.row(basis.rows()) = v.transpose();
  basis = lattice::hermite_normal_form(next);
}

struct Search {
  const IntMatrix& c;
  std::int64_t bound;
  std::size_t max_listed;
  IntMatrix suffix;  // suffix(i, j) = sum_{k >= j} |c(i, k)|
  IntVector current;
  IntVector partial;
  VertexEnumeration* out;
  const WireArray* array;

  void run(Index j) {
    const Index n = c.cols();
    if (j == n) {
      if (!partial.isZero() || current.isZero()) return;
      ++out->solution_count;
      if (out->solutions.size() < max_listed) {
        out->solutions.push_back(current);
        if (null_pairing(current, current, *array) == 0) out->null_solutions.push_back(current);
      } else {
        out->truncated = true;
      }
      grow_span(out->symmetric_basis, current);
      if (null_pairing(current, current, *array) == 0) grow_span(out->gapping_basis, current);
      return;
    }
    for (std::int64_t a = -bound; a <= bound; ++a) {
      current(j) = a;
      bool feasible = true;
      for (Index i = 0; i < c.rows(); ++i) {
        partial(i) += a * c(i, j);
        if (std::llabs(partial(i)) > bound * suffix(i, j + 1)) feasible = false;
      }
      if (feasible) run(j + 1);
      for (Index i = 0; i < c.rows(); ++i) partial(i) -= a * c(i, j);
    }
    current(j) = 0;
  }
};

}  // namespace

VertexEnumeration enumerate_symmetric_vertices(const WireArray& block, std::int64_t bound,
                                               std::size_t max_listed) {
  if (bound < 1) throw PreconditionError("enumeration bound must be >= 1");
  const Index n = block.size();
  if (n > kMaxEnumerationModes)
    throw CapacityError("exhaustive vertex search supports at most 12 modes, got " + std::to_string(n));
  const IntMatrix c = constraint_matrix(block);

  VertexEnumeration out;
  out.bound = bound;
  out.symmetric_basis = IntMatrix(0, n);
  out.gapping_basis = IntMatrix(0, n);
  const IntMatrix kernel = lattice::integer_kernel(c);
  out.kernel_rank = kernel.rows();
  // The box holds about (2B+1)^rank solutions; refuse searches that cannot finish.
  const double expected = std::pow(2.0 * static_cast<double>(bound) + 1.0, static_cast<double>(out.kernel_rank));
  if (expected > 5e8) throw CapacityError("vertex search space too large for the requested bound");
  if (n == 0) return out;

  Search s{c, bound, max_listed, IntMatrix::Zero(c.rows(), n + 1), IntVector::Zero(n), IntVector::Zero(c.rows()),
           &out, &block};
  for (Index i = 0; i < c.rows(); ++i)
    for (Index j = n - 1; j >= 0; --j) s.suffix(i, j) = s.suffix(i, j + 1) + std::llabs(c(i, j));
  s.run(0);
  out.saturated = out.symmetric_basis.rows() == kernel.rows() && out.symmetric_basis == kernel;
  return out;
}

namespace {

bool primitive_canonical(const IntVector& v) {
  std::int64_t g = 0;
  for (Index j = 0; j < v.size(); ++j) g = std::gcd(g, std::llabs(v(j)));
  if (g != 1) return false;
  for (Index j = 0; j < v.size(); ++j)
    if (v(j) != 0) return v(j) > 0;
  return false;
}

bool independent(const std::vector<IntVector>& vs) {
  if (vs.empty()) return true;
  Matrix<double> m(static_cast<Index>(vs.size()), vs.front().size());
  for (std::size_t i = 0; i < vs.size(); ++i) m.row(static_cast<Index>(i)) = vs[i].cast<double>().transpose();
  return Eigen::FullPivLU<Matrix<double>>(m).rank() == m.rows();
}

struct CliqueSearch {
  const std::vector<IntVector>& cand;
  const std::vector<std::vector<char>>& compatible;
  std::size_t target;
  std::size_t budget;
  std::size_t nodes = 0;
  std::vector<std::size_t> chosen;
  std::vector<std::size_t> best;

  bool run(std::size_t start) {
    if (++nodes > budget) return false;
    if (chosen.size() > best.size()) best = chosen;
    if (best.size() >= target) return true;
    for (std::size_t k = start; k < cand.size(); ++k) {
      if (chosen.size() + (cand.size() - k) <= best.size()) break;
      bool ok = true;
      for (std::size_t c : chosen)
        if (!compatible[c][k]) ok = false;
      if (!ok) continue;
      chosen.push_back(k);
      std::vector<IntVector> vs;
      for (std::size_t c : chosen) vs.push_back(cand[c]);
      if (independent(vs) && run(k + 1)) return true;
      chosen.pop_back();
      if (nodes > budget) return false;
    }
    return false;
  }
};

}  // namespace

GappingResult max_gappable_set(const WireArray& block, std::int64_t bound) {
  const Index n = block.size();
  Index right = 0;
  for (const auto& m : block.modes())
    if (m.chirality == Chirality::Right) ++right;
  if (n % 2 != 0 || 2 * right != n)
    throw PreconditionError("gapping search needs an even, chirality-balanced block");

  const VertexEnumeration en = enumerate_symmetric_vertices(block, bound);
  std::vector<IntVector> cand;
  for (const auto& v : en.null_solutions)
    if (primitive_canonical(v)) cand.push_back(v);
  std::stable_sort(cand.begin(), cand.end(), [](const IntVector& a, const IntVector& b) {
    const auto l1a = a.cwiseAbs().sum();
    const auto l1b = b.cwiseAbs().sum();
    if (l1a != l1b) return l1a < l1b;
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });

  std::vector<std::vector<char>> compatible(cand.size(), std::vector<char>(cand.size(), 0));
  for (std::size_t i = 0; i < cand.size(); ++i)
    for (std::size_t j = 0; j < cand.size(); ++j)
      compatible[i][j] = null_pairing(cand[i], cand[j], block) == 0;

  const std::size_t target = static_cast<std::size_t>(n / 2);
  CliqueSearch cs{cand, compatible, target, 2000000, 0, {}, {}};
  const bool hit_target = cs.run(0);

  GappingResult out;
  out.bound = bound;
  for (std::size_t k : cs.best) out.vertices.push_back(cand[k]);
  out.fully_gapped = out.vertices.size() == target && target > 0;
  out.exhaustive = !en.truncated && (hit_target || cs.nodes <= cs.budget);
  return out;
}

bool verify_gapping_set(const WireArray& block, const std::vector<IntVector>& vertices) {
  for (const auto& v : vertices) {
    for (const auto& g : block.generators())
      if (charge_of(v, g, block) != 0) return false;
    for (const auto& w : vertices)
      if (null_pairing(v, w, block) != 0) return false;
  }
  return independent(vertices);
}

namespace blocks {

namespace {

SymmetryGenerator charge_gen() { return {"e", constant_modulation(), Strength::Strong}; }
SymmetryGenerator dipole_gen() { return {"d", monomial(1), Strength::Strong}; }

ChiralMode mode(std::string id, std::int64_t x, Chirality c, std::string flavor) {
  return {std::move(id), Position::at(x), c, std::move(flavor), 1};
}

ChiralMode mode2(std::string id, std::int64_t x, std::int64_t y, Chirality c) {
  return {std::move(id), Position::at(x, y), c, "", 1};
}

}  // namespace

WireArray tdi_building_block() {
  return WireArray({mode("phi1_L@0", 0, Chirality::Left, "1"), mode("phi2_R@1", 1, Chirality::Right, "2"),
                    mode("phi1_R@1", 1, Chirality::Right, "1"), mode("phi2_L@2", 2, Chirality::Left, "2")},
                   {charge_gen(), dipole_gen()});
}

WireArray tdi_edge_pair() {
  return WireArray({mode("phi1_R@0", 0, Chirality::Right, "1"), mode("phi2_L@1", 1, Chirality::Left, "2")},
                   {charge_gen(), dipole_gen()});
}

WireArray hoti_block() {
  std::vector<SymmetryGenerator> gens;
  for (std::int64_t y = 0; y <= 1; ++y)
    gens.push_back({"xz@y=" + std::to_string(y), PlaneIndicator{Axis::Y, y}, Strength::Strong});
  for (std::int64_t x = 0; x <= 1; ++x)
    gens.push_back({"yz@x=" + std::to_string(x), PlaneIndicator{Axis::X, x}, Strength::Strong});
  return WireArray({mode2("L(0,0)", 0, 0, Chirality::Left), mode2("R(1,0)", 1, 0, Chirality::Right),
                    mode2("R(0,1)", 0, 1, Chirality::Right), mode2("L(1,1)", 1, 1, Chirality::Left)},
                   std::move(gens));
}

WireArray helical_pair_copies() {
  return WireArray({mode("a_R", 0, Chirality::Right, "a"), mode("a_L", 0, Chirality::Left, "a"),
                    mode("b_R", 0, Chirality::Right, "b"), mode("b_L", 0, Chirality::Left, "b")},
                   {charge_gen()});
}

std::vector<std::string> names() { return {"tdi-block", "tdi-edge", "hoti-block", "helical-copies"}; }

WireArray by_name(const std::string& name) {
  if (name == "tdi-block") return tdi_building_block();
  if (name == "tdi-edge") return tdi_edge_pair();
  if (name == "hoti-block") return hoti_block();
  if (name == "helical-copies") return helical_pair_copies();
  throw LookupError("unknown block '" + name + "'");
}

}  // namespace blocks

}  // namespace mslab
