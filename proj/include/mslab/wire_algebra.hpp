#ifndef MSLAB_WIRE_ALGEBRA_HPP
#define MSLAB_WIRE_ALGEBRA_HPP

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mslab/types.hpp"

namespace mslab {

// R = +1, L = -1 everywhere in the library.
enum class Chirality : int { Left = -1, Right = 1 };

inline int sign(Chirality c) { return static_cast<int>(c); }

enum class Axis { X, Y };

struct Position {
  std::int64_t x = 0;
  std::int64_t y = 0;
  int dims = 1;

  static Position at(std::int64_t x) { return {x, 0, 1}; }
  static Position at(std::int64_t x, std::int64_t y) { return {x, y, 2}; }
  std::int64_t coord(Axis a) const;
  bool operator==(const Position&) const = default;
};

// f(r) = sum_k coeffs[k] * r_axis^k
struct Polynomial {
  Axis axis = Axis::X;
  std::vector<std::int64_t> coeffs;
};

// f(r) = 1 if r_axis == value else 0
struct PlaneIndicator {
  Axis axis = Axis::X;
  std::int64_t value = 0;
};

// f(r) = table[(x, y)], 0 for absent positions. 1D positions use y = 0.
struct Tabulated {
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> table;
};

using Modulation = std::variant<Polynomial, PlaneIndicator, Tabulated>;

std::int64_t evaluate(const Modulation& f, const Position& r);

// Polynomial p(r) -> p(r - r0) along its own axis.
Polynomial shift_origin(const Polynomial& p, std::int64_t r0);

inline Polynomial constant_modulation() { return {Axis::X, {1}}; }
// x^n on the given axis.
Polynomial monomial(int n, Axis axis = Axis::X);

// Short human-readable form: "1", "x", "2 + x^2", "plane(y=0)", "table[3]".
std::string describe(const Modulation& f);

enum class Strength { Strong, Weak };

std::string to_string(Strength s);

struct SymmetryGenerator {
  std::string name;
  Modulation modulation;
  Strength strength = Strength::Strong;
};

struct ChiralMode {
  std::string id;
  Position position;
  Chirality chirality = Chirality::Right;
  std::string flavor;
  std::int64_t base_charge = 1;
};

// Ordered chiral modes, the U(1) generators acting on them, and an optional
// region label per mode. The constructor validates ids, names and labels and
// throws PreconditionError on violation.
class WireArray {
 public:
  WireArray() = default;
  WireArray(std::vector<ChiralMode> modes, std::vector<SymmetryGenerator> generators,
            std::map<std::string, std::string> regions = {});

  const std::vector<ChiralMode>& modes() const { return modes_; }
  const std::vector<SymmetryGenerator>& generators() const { return generators_; }
  const std::map<std::string, std::string>& regions() const { return regions_; }
  Index size() const { return static_cast<Index>(modes_.size()); }

  // LookupError for unknown ids / names.
  Index index_of(const std::string& mode_id) const;
  const SymmetryGenerator& generator(const std::string& name) const;
  Index generator_index(const std::string& name) const;

  // Region labels in sorted order; modes without a label are reported under
  // "unassigned" when at least one mode carries a label.
  std::vector<std::string> region_labels() const;
  std::vector<Index> region_members(const std::string& label) const;
  std::string region_of(Index mode) const;

  // Same modes, different generator list (e.g. strengths flipped).
  WireArray with_generators(std::vector<SymmetryGenerator> generators) const;
  // Concatenation; mode ids and region labels must not collide.
  WireArray disjoint_union(const WireArray& other) const;

 private:
  std::vector<ChiralMode> modes_;
  std::vector<SymmetryGenerator> generators_;
  std::map<std::string, std::string> regions_;
  std::map<std::string, Index> index_;
};

struct VertexVector {
  std::map<std::string, std::int64_t> coeffs;

  bool is_zero() const;
  static VertexVector from_dense(const WireArray& array, const IntVector& v);
};

IntVector dense(const VertexVector& v, const WireArray& array);

std::int64_t charge_of(const VertexVector& v, const SymmetryGenerator& g, const WireArray& array);
std::int64_t null_pairing(const VertexVector& v1, const VertexVector& v2, const WireArray& array);

// Dense forms over the array's mode order.
std::int64_t charge_of(const IntVector& v, const SymmetryGenerator& g, const WireArray& array);
std::int64_t null_pairing(const IntVector& v1, const IntVector& v2, const WireArray& array);

// Row g, column j: base_charge_j * f_g(position_j).
IntMatrix constraint_matrix(const WireArray& array);

// Vectors with all generator charges zero and |coeff| <= bound.
//
// The symmetric solutions form a lattice; `symmetric_basis` spans the
// in-bound ones. Only self-null solutions (sum_j chirality_j coeff_j^2 = 0)
// are local non-chiral terms that can condense, and `gapping_basis` spans
// those. Basis rows are in Hermite normal form.
struct VertexEnumeration {
  std::int64_t bound = 0;
  std::vector<IntVector> solutions;  // lexicographic ascending, capped at the listing limit
  std::uint64_t solution_count = 0;
  bool truncated = false;
  IntMatrix symmetric_basis;
  IntMatrix gapping_basis;
  std::vector<IntVector> null_solutions;  // self-null subset of `solutions`
  Index kernel_rank = 0;                  // rank of the full (unbounded) symmetric lattice
  bool saturated = false;                 // in-bound solutions generate the full lattice

  Index symmetric_rank() const { return symmetric_basis.rows(); }
  Index gapping_rank() const { return gapping_basis.rows(); }
};

inline constexpr Index kMaxEnumerationModes = 12;

VertexEnumeration enumerate_symmetric_vertices(const WireArray& block, std::int64_t bound = 3,
                                               std::size_t max_listed = 1000000);

struct GappingResult {
  std::int64_t bound = 0;
  std::vector<IntVector> vertices;
  bool fully_gapped = false;
  bool exhaustive = true;  // false if the listing cap or search budget was hit
};

GappingResult max_gappable_set(const WireArray& block, std::int64_t bound = 3);

// Symmetric under every generator, pairwise and self null, linearly
// independent over the rationals.
bool verify_gapping_set(const WireArray& block, const std::vector<IntVector>& vertices);

namespace blocks {

// phi1_L@0, phi2_R@1, phi1_R@1, phi2_L@2 with charge e (f = 1) and dipole d (f = x).
WireArray tdi_building_block();
// phi1_R@0, phi2_L@1 with e and d.
WireArray tdi_edge_pair();
// (0,0)L, (1,0)R, (0,1)R, (1,1)L with every xz-plane (y = const) and
// yz-plane (x = const) indicator through the cell.
WireArray hoti_block();
// R, L, R, L all at x = 0 with charge only.
WireArray helical_pair_copies();

WireArray by_name(const std::string& name);
std::vector<std::string> names();

}  // namespace blocks

}  // namespace mslab

#endif  // MSLAB_WIRE_ALGEBRA_HPP
