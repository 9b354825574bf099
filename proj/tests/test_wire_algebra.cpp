#include <doctest.h>

#include <set>

#include "mslab/errors.hpp"
#include "mslab/acceptance.hpp"
#include "mslab/integer_lattice.hpp"
#include "mslab/wire_algebra.hpp"

using namespace mslab;

namespace {

IntVector vec(std::initializer_list<std::int64_t> v) {
  IntVector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (auto x : v) out(i++) = x;
  return out;
}

// Brute force over the full box, independent of the lattice machinery.
std::vector<IntVector> brute_force_symmetric(const WireArray& a, std::int64_t bound) {
  const Index n = a.size();
  std::vector<IntVector> out;
  IntVector v = IntVector::Constant(n, -bound);
  while (true) {
    bool symmetric = !v.isZero();
    for (const auto& g : a.generators()) symmetric = symmetric && charge_of(v, g, a) == 0;
    if (symmetric) out.push_back(v);
    Index i = n - 1;
    while (i >= 0 && v(i) == bound) v(i--) = -bound;
    if (i < 0) break;
    ++v(i);
  }
  return out;
}

WireArray random_block(Engine& eng, Index n) {
  std::vector<ChiralMode> modes;
  for (Index i = 0; i < n; ++i) {
    ChiralMode m;
    m.id = "m" + std::to_string(i);
    m.position = Position::at(static_cast<std::int64_t>(uniform_index(eng, 5)) - 1);
    m.chirality = uniform_index(eng, 2) ? Chirality::Right : Chirality::Left;
    modes.push_back(m);
  }
  std::vector<SymmetryGenerator> gens{{"e", constant_modulation(), Strength::Strong},
                                      {"d", monomial(1), Strength::Weak},
                                      {"q", monomial(2), Strength::Weak}};
  return WireArray(modes, gens);
}

}  // namespace

TEST_SUITE("wire-algebra") {
  TEST_CASE("modulation evaluation") {
    CHECK(evaluate(monomial(0), Position::at(7)) == 1);
    CHECK(evaluate(monomial(2), Position::at(-3)) == 9);
    CHECK(evaluate(monomial(1, Axis::Y), Position::at(4, -2)) == -2);
    CHECK(evaluate(PlaneIndicator{Axis::X, 2}, Position::at(2, 5)) == 1);
    CHECK(evaluate(PlaneIndicator{Axis::X, 2}, Position::at(3, 5)) == 0);
    Tabulated t;
    t.table[{1, 0}] = 4;
    CHECK(evaluate(t, Position::at(1)) == 4);
    CHECK(evaluate(t, Position::at(2)) == 0);
    const Polynomial p{Axis::X, {1, -2, 3}};
    const Polynomial s = shift_origin(p, 2);
    for (std::int64_t x = -4; x <= 4; ++x) CHECK(evaluate(s, Position::at(x)) == evaluate(p, Position::at(x - 2)));
  }

  TEST_CASE("charge_of on the TDI block") {
    const WireArray b = blocks::tdi_building_block();
    const IntVector v = vec({1, -1, -1, 1});
    for (const auto& g : b.generators()) CHECK(charge_of(v, g, b) == 0);
    CHECK(null_pairing(v, v, b) == 0);
    // (0,1,-1,0) is symmetric but chiral.
    const IntVector w = vec({0, 1, -1, 0});
    for (const auto& g : b.generators()) CHECK(charge_of(w, g, b) == 0);
    CHECK(null_pairing(w, w, b) == 2);
    CHECK(charge_of(VertexVector::from_dense(b, v), b.generator("d"), b) == 0);
    CHECK(dense(VertexVector::from_dense(b, v), b) == v);
  }

  TEST_CASE("charge_of is linear") {
    Engine eng(derive_seed(11, "test-linearity"));
    for (int t = 0; t < 50; ++t) {
      const WireArray b = random_block(eng, 6);
      IntVector u(6), v(6);
      for (Index i = 0; i < 6; ++i) {
        u(i) = static_cast<std::int64_t>(uniform_index(eng, 9)) - 4;
        v(i) = static_cast<std::int64_t>(uniform_index(eng, 9)) - 4;
      }
      const std::int64_t a = static_cast<std::int64_t>(uniform_index(eng, 7)) - 3;
      for (const auto& g : b.generators())
        CHECK(charge_of(IntVector(a * u + v), g, b) == a * charge_of(u, g, b) + charge_of(v, g, b));
    }
  }

  TEST_CASE("origin shift of the dipole modulation") {
    Engine eng(derive_seed(11, "test-origin"));
    for (int t = 0; t < 50; ++t) {
      const WireArray b = random_block(eng, 5);
      IntVector v(5);
      for (Index i = 0; i < 5; ++i) v(i) = static_cast<std::int64_t>(uniform_index(eng, 7)) - 3;
      const std::int64_t x0 = static_cast<std::int64_t>(uniform_index(eng, 11)) - 5;
      const SymmetryGenerator shifted{"d'", shift_origin(monomial(1), x0), Strength::Weak};
      const auto qe = charge_of(v, b.generator("e"), b);
      const auto qd = charge_of(v, b.generator("d"), b);
      CHECK(charge_of(v, shifted, b) == qd - x0 * qe);
      if (qe == 0) CHECK(charge_of(v, shifted, b) == qd);
    }
  }

  TEST_CASE("hermite normal form") {
    IntMatrix m(3, 4);
    m << 2, 4, 6, 8, 1, 3, 5, 7, 3, 7, 11, 15;
    const IntMatrix h = lattice::hermite_normal_form(m);
    CHECK(h.rows() == 2);
    CHECK(lattice::rank(m) == 2);
    for (Index r = 0; r < m.rows(); ++r) CHECK(lattice::in_span(h, m.row(r).transpose()));
    for (Index r = 0; r < h.rows(); ++r) CHECK(lattice::in_span(m, h.row(r).transpose()));
    CHECK_FALSE(lattice::in_span(h, vec({1, 0, 0, 0})));
    // Idempotent and independent of row order.
    CHECK(lattice::hermite_normal_form(h) == h);
    IntMatrix p(3, 4);
    p << m.row(2), m.row(0), m.row(1);
    CHECK(lattice::hermite_normal_form(p) == h);
  }

  TEST_CASE("integer kernel") {
    IntMatrix c(2, 4);
    c << 1, 1, 1, 1, 0, 1, 1, 2;
    const IntMatrix k = lattice::integer_kernel(c);
    CHECK(k.rows() == 2);
    CHECK((c * k.transpose()).isZero());
    CHECK(lattice::in_span(k, vec({1, -1, -1, 1})));
    CHECK(lattice::in_span(k, vec({0, 1, -1, 0})));
  }

  TEST_CASE("overflow raises CapacityError") {
    IntMatrix m(2, 2);
    m << std::numeric_limits<std::int64_t>::max(), 3, 2, std::numeric_limits<std::int64_t>::max();
    CHECK_THROWS_AS(lattice::hermite_normal_form(m), CapacityError);
  }

  TEST_CASE("enumeration matches brute force") {
    for (const auto& name : blocks::names()) {
      const WireArray b = blocks::by_name(name);
      const VertexEnumeration en = enumerate_symmetric_vertices(b, 2);
      const auto brute = brute_force_symmetric(b, 2);
      CHECK(en.solution_count == brute.size());
      REQUIRE(en.solutions.size() == brute.size());
      for (std::size_t i = 0; i < brute.size(); ++i) CHECK(en.solutions[i] == brute[i]);
    }
  }

  TEST_CASE("TDI block lattices") {
    const WireArray b = blocks::tdi_building_block();
    const VertexEnumeration en = enumerate_symmetric_vertices(b, 3);
    CHECK(en.solution_count == 24);
    CHECK(en.kernel_rank == 2);
    CHECK(en.saturated);
    CHECK(en.symmetric_rank() == 2);
    REQUIRE(en.gapping_rank() == 1);
    CHECK(IntVector(en.gapping_basis.row(0).transpose()) == vec({1, -1, -1, 1}));
    const GappingResult g = max_gappable_set(b, 3);
    CHECK_FALSE(g.fully_gapped);
    CHECK(g.vertices.size() == 1);
  }

  TEST_CASE("edge pair and HOTI block") {
    const VertexEnumeration edge = enumerate_symmetric_vertices(blocks::tdi_edge_pair(), 3);
    CHECK(edge.solution_count == 0);
    CHECK(edge.gapping_rank() == 0);
    const VertexEnumeration hoti = enumerate_symmetric_vertices(blocks::hoti_block(), 3);
    REQUIRE(hoti.gapping_rank() == 1);
    CHECK(IntVector(hoti.gapping_basis.row(0).transpose()) == vec({1, -1, -1, 1}));
  }

  TEST_CASE("two helical copies gap fully under the charge alone") {
    const WireArray b = blocks::helical_pair_copies();
    const GappingResult g = max_gappable_set(b, 3);
    CHECK(g.fully_gapped);
    CHECK(g.vertices.size() == 2);
    CHECK(verify_gapping_set(b, g.vertices));
  }

  TEST_CASE("solutions closed under negation and in-bound sums") {
    for (const auto& name : blocks::names()) {
      const WireArray b = blocks::by_name(name);
      const VertexEnumeration en = enumerate_symmetric_vertices(b, 3);
      std::set<std::vector<std::int64_t>> seen;
      for (const auto& s : en.solutions) seen.insert(std::vector<std::int64_t>(s.data(), s.data() + s.size()));
      auto has = [&](const IntVector& v) { return seen.count(std::vector<std::int64_t>(v.data(), v.data() + v.size())) > 0; };
      for (std::size_t i = 0; i < en.solutions.size(); i += 7) {
        CHECK(has(IntVector(-en.solutions[i])));
        for (std::size_t j = 0; j < en.solutions.size(); j += 11) {
          const IntVector s = en.solutions[i] + en.solutions[j];
          if (!s.isZero() && s.cwiseAbs().maxCoeff() <= 3) CHECK(has(s));
        }
      }
    }
  }

  TEST_CASE("gapping vertices re-verify on random blocks") {
    Engine eng(derive_seed(11, "test-gapping"));
    int nontrivial = 0;
    for (int t = 0; t < 30; ++t) {
      std::vector<ChiralMode> modes;
      for (Index i = 0; i < 6; ++i) {
        ChiralMode m;
        m.id = "m" + std::to_string(i);
        m.position = Position::at(static_cast<std::int64_t>(uniform_index(eng, 3)));
        m.chirality = i % 2 ? Chirality::Left : Chirality::Right;
        modes.push_back(m);
      }
      std::vector<SymmetryGenerator> gens{{"e", constant_modulation(), Strength::Strong}};
      if (uniform_index(eng, 2)) gens.push_back({"d", monomial(1), Strength::Weak});
      const WireArray b(modes, gens);
      const GappingResult g = max_gappable_set(b, 2);
      CHECK(verify_gapping_set(b, g.vertices));
      for (const auto& v : g.vertices) {
        for (const auto& gen : b.generators()) CHECK(charge_of(v, gen, b) == 0);
        for (const auto& u : g.vertices) CHECK(null_pairing(u, v, b) == 0);
      }
      if (!g.vertices.empty()) ++nontrivial;
    }
    CHECK(nontrivial > 0);
  }

  TEST_CASE("capacity limits") {
    std::vector<ChiralMode> modes;
    for (Index i = 0; i < 13; ++i) modes.push_back({"m" + std::to_string(i), Position::at(0), Chirality::Right, "", 1});
    const WireArray big(modes, {{"e", constant_modulation(), Strength::Strong}});
    CHECK_THROWS_AS(enumerate_symmetric_vertices(big, 1), CapacityError);
    CHECK_THROWS_AS(blocks::by_name("nope"), LookupError);
  }
}
