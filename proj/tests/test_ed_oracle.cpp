#include <doctest.h>

#include <cmath>
#include <bit>
#include <numbers>
#include <set>

#include "mslab/errors.hpp"
#include "mslab/ed_oracle.hpp"

using namespace mslab;

namespace {

constexpr double kPi = std::numbers::pi;

DensityMatrixED random_rho(Index modes, Index members, Engine& eng) {
  const FockSpace space(modes);
  std::vector<FockVector> states;
  std::vector<double> w;
  for (Index k = 0; k < members; ++k) {
    const Index p = static_cast<Index>(uniform_index(eng, static_cast<std::uint64_t>(modes + 1)));
    states.push_back(slater_to_fock(random_slater(modes, p, eng), space));
    w.push_back(uniform01(eng) + 0.1);
  }
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return assemble_density_matrix(states, w);
}

}  // namespace

TEST_SUITE("ed-oracle") {
  TEST_CASE("Fock space layout") {
    const FockSpace full(5);
    CHECK(full.dim() == 32);
    const FockSpace sector(6, 2);
    CHECK(sector.dim() == 15);
    for (Index i = 0; i < sector.dim(); ++i) {
      CHECK(std::popcount(sector.word(i)) == 2);
      CHECK(sector.index_of(sector.word(i)) == i);
    }
    CHECK_THROWS_AS(FockSpace(15), CapacityError);
  }

  TEST_CASE("anticommutation signs") {
    const FockSpace space(3);
    FockVector vac = FockVector::Zero(space.dim());
    vac(space.index_of(0)) = 1.0;
    const FockVector ab = apply_string(space, {cdag(0), cdag(1)}, vac);
    const FockVector ba = apply_string(space, {cdag(1), cdag(0)}, vac);
    CHECK((ab + ba).norm() < 1e-15);
    // |n> = c+_0 c+_1 |0> is stored with amplitude +1 on word 0b011.
    CHECK(std::abs(ab(space.index_of(0b011)) - Complex(1.0)) < 1e-15);
    // c+_2 passes two occupied modes: sign +1; c+_1 on |1,0,1> passes one: sign -1.
    FockVector s101 = FockVector::Zero(space.dim());
    s101(space.index_of(0b101)) = 1.0;
    CHECK(std::abs(apply_string(space, {cdag(1)}, s101)(space.index_of(0b111)) - Complex(-1.0)) < 1e-15);
    const FockMatrix n1 = operator_matrix(space, {cdag(1), c(1)});
    for (Index i = 0; i < space.dim(); ++i)
      CHECK(std::abs(n1(i, i) - Complex(static_cast<double>((space.word(i) >> 1) & 1u))) < 1e-15);
  }

  TEST_CASE("Slater embedding is normalized") {
    Engine eng(derive_seed(2, "test-embed"));
    const FockSpace space(6);
    for (Index p = 0; p <= 6; ++p) CHECK(std::abs(slater_to_fock(random_slater(6, p, eng), space).norm() - 1.0) < 1e-12);
  }

  TEST_CASE("Gaussian formulas against brute force") {
    Engine eng(derive_seed(2, "test-crosscheck"));
    std::set<TransitionPath> paths;
    for (int kind = 0; kind < 3; ++kind)
      for (Index modes : {4, 6, 8}) {
        const CrosscheckReport r = random_crosscheck(modes, kind, 10, eng);
        CHECK(r.max_dev() < 1e-10);
        CHECK(r.checks > 0);
        for (auto p : r.paths_seen) paths.insert(p);
      }
    CHECK(paths.size() == 3);
  }

  TEST_CASE("density matrix validation") {
    FockMatrix m = FockMatrix::Identity(4, 4) / 4.0;
    CHECK_NOTHROW(DensityMatrixED{m});
    FockMatrix bad = m;
    bad(0, 1) = 0.1;
    CHECK_THROWS_AS(DensityMatrixED{bad}, PreconditionError);
    bad = m * 2.0;
    CHECK_THROWS_AS(DensityMatrixED{bad}, PreconditionError);
    bad = m;
    bad(0, 0) = -0.25;
    bad(1, 1) = 0.75;
    CHECK_THROWS_AS(DensityMatrixED{bad}, PreconditionError);
    CHECK(DensityMatrixED{m}.purity() == doctest::Approx(0.25));
  }

  TEST_CASE("Choi vector norm is the purity") {
    Engine eng(derive_seed(2, "test-choi"));
    for (int t = 0; t < 10; ++t) {
      const DensityMatrixED rho = random_rho(4, 3, eng);
      CHECK(std::abs(choi_vector(rho).squaredNorm() - rho.purity()) < 1e-12);
    }
  }

  TEST_CASE("EPR identity on random instances") {
    Engine eng(derive_seed(2, "test-epr"));
    for (int t = 0; t < 10; ++t) {
      const Index modes = 4 + t % 3;
      const DensityMatrixED rho = random_rho(modes, 1 + t % 4, eng);
      const FockSpace space(modes);
      const Index a = static_cast<Index>(uniform_index(eng, static_cast<std::uint64_t>(modes)));
      const Index b = static_cast<Index>(uniform_index(eng, static_cast<std::uint64_t>(modes)));
      const FockMatrix A = operator_matrix(space, {cdag(a), c(b), cdag(b), c(a)});
      const FockMatrix B = operator_matrix(space, {cdag(b), c(a)}) + operator_matrix(space, {cdag(a), c(a)});
      const EprIdentity e = epr_renyi_identity(rho, A, B);
      CHECK(e.equal);
      const Complex direct = (rho.matrix() * A * rho.matrix() * B).trace() / rho.purity();
      CHECK(std::abs(e.lhs - direct) < 1e-12);
    }
  }

  TEST_CASE("strong implies weak") {
    Engine eng(derive_seed(2, "test-strong-weak"));
    int strong_seen = 0;
    for (int t = 0; t < 30; ++t) {
      const FockSpace space(4);
      // Alternate between fixed-charge and mixed-charge ensembles.
      std::vector<FockVector> states;
      const Index p = 2;
      for (int k = 0; k < 3; ++k)
        states.push_back(slater_to_fock(random_slater(4, t % 2 ? p : p + k % 2, eng), space));
      const DensityMatrixED rho = assemble_density_matrix(states, {0.5, 0.3, 0.2});
      for (double angle : {kPi, 0.9, 2.0}) {
        for (const auto& op : {edge_charge_op(space, angle), edge_dipole_op(space, angle)}) {
          const SymmetryCheck s = strong_symmetry_check(rho, op);
          const SymmetryCheck w = weak_symmetry_check(rho, op);
          if (s.pass) {
            ++strong_seen;
            CHECK(w.pass);
          }
        }
      }
    }
    CHECK(strong_seen > 0);
  }

  TEST_CASE("strong check phase and vanishing trace diagnostic") {
    Engine eng(derive_seed(2, "test-phase"));
    const FockSpace space(4);
    const DensityMatrixED rho = assemble_density_matrix({slater_to_fock(random_slater(4, 3, eng), space)}, {1.0});
    const SymmetryCheck s = strong_symmetry_check(rho, edge_charge_op(space, 0.4));
    CHECK(s.pass);
    CHECK(std::abs(std::remainder(s.phase - 3 * 0.4, 2 * kPi)) < 1e-12);
    // Equal mixture of charges 1 and 3 under a pi/2 rotation: tr[U rho] = 0.
    const DensityMatrixED mix = assemble_density_matrix(
        {slater_to_fock(random_slater(4, 1, eng), space), slater_to_fock(random_slater(4, 3, eng), space)}, {0.5, 0.5});
    const SymmetryCheck v = strong_symmetry_check(mix, edge_charge_op(space, kPi / 2));
    CHECK_FALSE(v.pass);
    CHECK_FALSE(v.diagnostic.empty());
    CHECK(weak_symmetry_check(mix, edge_charge_op(space, kPi / 2)).pass);
  }

  TEST_CASE("edge ensembles: fixed winding vs winding mixture") {
    EnsembleSpec s;
    s.sites = 4;
    s.samples = 16;
    s.mass = 1.0;
    s.stiffness = 0.5;
    s.fit_min = 1;
    s.fit_max = 2;
    s.seed = 99;
    s.winding = WindingRule::fixed(0);
    const EdEnsemble fixed = build_ed_ensemble(s, true);
    CHECK(strong_symmetry_check(*fixed.rho, edge_charge_op(fixed.space, kPi)).pass);
    CHECK(weak_symmetry_check(*fixed.rho, edge_charge_op(fixed.space, kPi)).pass);
    CHECK(weak_symmetry_check(*fixed.rho, edge_dipole_op(fixed.space, 0.9)).pass);
    CHECK(charge_sectors(*fixed.rho, fixed.space).size() == 1);
    s.winding = WindingRule{{0, 1}, {0.5, 0.5}};
    const EdEnsemble mix = build_ed_ensemble(s, true);
    CHECK_FALSE(strong_symmetry_check(*mix.rho, edge_charge_op(mix.space, kPi)).pass);
    CHECK(weak_symmetry_check(*mix.rho, edge_charge_op(mix.space, kPi)).pass);
    CHECK(weak_symmetry_check(*mix.rho, edge_dipole_op(mix.space, 0.9)).pass);
    const auto sectors = charge_sectors(*mix.rho, mix.space);
    CHECK(sectors.size() == 2);
    double total = 0.0;
    for (const auto& c : sectors) total += c.weight;
    CHECK(total == doctest::Approx(1.0));
  }
}
