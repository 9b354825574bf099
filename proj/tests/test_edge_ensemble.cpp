#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mslab/errors.hpp"
#include "mslab/ed_oracle.hpp"
#include "mslab/edge_ensemble.hpp"

using namespace mslab;

namespace {

EnsembleSpec small_spec(std::uint64_t seed) {
  EnsembleSpec s;
  s.sites = 16;
  s.samples = 12;
  s.seed = seed;
  s.mass = 0.8;
  s.stiffness = 0.3;
  s.fit_min = 1;
  s.fit_max = 8;
  return s;
}

Matrix<Complex> random_unitary(Index p, Engine& eng) {
  Matrix<Complex> a(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j) a(i, j) = Complex(standard_normal(eng), standard_normal(eng));
  return Eigen::HouseholderQR<Matrix<Complex>>(a).householderQ() * Matrix<Complex>::Identity(p, p);
}

std::vector<double> powers(double a) {
  std::vector<double> y;
  for (int d = 1; d <= 24; ++d) y.push_back(std::pow(static_cast<double>(d), -a));
  return y;
}

std::vector<Index> distances(Index n) {
  std::vector<Index> d;
  for (Index i = 1; i <= n; ++i) d.push_back(i);
  return d;
}

}  // namespace

TEST_SUITE("edge-ensemble") {
  TEST_CASE("fit_decay on exact synthetics") {
    const auto d = distances(24);
    const FitRecord p = fit_decay(d, powers(0.7), 4, 24);
    CHECK(p.model == FitRecord::Model::Power);
    CHECK(p.exponent == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(p.r2_power == doctest::Approx(1.0));
    CHECK(p.margin > 0.0);
    std::vector<double> e;
    for (Index x : d) e.push_back(std::exp(-static_cast<double>(x) / 3.0));
    const FitRecord f = fit_decay(d, e, 4, 24);
    CHECK(f.model == FitRecord::Model::Exponential);
    CHECK(std::abs(f.length - 3.0) < 0.1);
    CHECK(f.window_min == 4);
    CHECK(f.window_max == 24);
    CHECK(f.bins_used == 21);
  }

  TEST_CASE("fit_decay with multiplicative noise") {
    Engine eng(derive_seed(9, "test-fit-noise"));
    const auto d = distances(24);
    for (int t = 0; t < 20; ++t) {
      auto y = powers(0.7);
      for (auto& v : y) v *= 1.0 + 0.05 * standard_normal(eng);
      const FitRecord r = fit_decay(d, y, 4, 24);
      CHECK(r.model == FitRecord::Model::Power);
      CHECK(std::abs(r.exponent - 0.7) < 0.1);
    }
  }

  TEST_CASE("fit_decay window rules") {
    const auto d = distances(24);
    CHECK_THROWS_AS(fit_decay(d, powers(1.0), 4, 8), PreconditionError);
    auto y = powers(1.0);
    for (std::size_t i = 3; i < 24; ++i) y[i] = (i % 8 == 0) ? y[i] : -1.0;
    CHECK_THROWS_AS(fit_decay(d, y, 4, 24), FitError);
  }

  TEST_CASE("EnsembleSpec validation") {
    EnsembleSpec s = small_spec(1);
    s.samples = 1;
    CHECK_THROWS_AS(s.validate(), PreconditionError);
    s = small_spec(1);
    s.winding = WindingRule{{0, 1}, {0.5, 0.4}};
    CHECK_THROWS_AS(s.validate(), PreconditionError);
    s = small_spec(1);
    s.stiffness = -0.1;
    CHECK_THROWS_AS(s.validate(), PreconditionError);
    s = small_spec(1);
    s.fit_max = 9;
    CHECK_THROWS_AS(s.validate(), PreconditionError);
  }

  TEST_CASE("profiles: g = 0 and winding") {
    EnsembleSpec s = small_spec(4);
    s.stiffness = 0.0;
    s.winding = WindingRule::fixed(2);
    const MassProfile p = sample_mass_profile(s, 3);
    CHECK(p.winding == 2);
    CHECK(lattice_winding(p.phase) == 2);
    const double step = 2.0 * std::numbers::pi * 2.0 / 16.0;
    for (Index y = 1; y < 16; ++y) CHECK(std::abs(p.phase[static_cast<std::size_t>(y)] - p.phase[0] - step * static_cast<double>(y)) < 1e-12);
  }

  TEST_CASE("phase increment variance grows as 2 g log distance") {
    EnsembleSpec s;
    s.sites = 128;
    s.stiffness = 0.5;
    s.seed = 2024;
    const Index n = s.sites;
    const int k = 10000;
    std::vector<double> var(17, 0.0);
    for (int i = 0; i < k; ++i) {
      const MassProfile p = sample_mass_profile(s, static_cast<std::uint64_t>(i));
      for (Index dd = 2; dd <= 16; ++dd) {
        double acc = 0.0;
        for (Index y = 0; y < n; y += 8) {
          const double diff = p.phase[static_cast<std::size_t>((y + dd) % n)] - p.phase[static_cast<std::size_t>(y)];
          acc += diff * diff;
        }
        var[static_cast<std::size_t>(dd)] += acc / static_cast<double>(n / 8) / k;
      }
    }
    // Synthesized covariance: sum_k (g / k) 2 (1 - cos(2 pi k d / N)), k <= N / 4.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (Index dd = 2; dd <= 16; ++dd) {
      double model = 0.0;
      for (Index m = 1; m <= n / 4; ++m)
        model += s.stiffness / static_cast<double>(m) * 2.0 *
                 (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(m * dd) / static_cast<double>(n)));
      CHECK(std::abs(var[static_cast<std::size_t>(dd)] / model - 1.0) < 0.05);
      const double x = std::log(static_cast<double>(dd));
      const double y = var[static_cast<std::size_t>(dd)];
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double m = 15.0;
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    CHECK(std::abs(slope / (2.0 * s.stiffness) - 1.0) < 0.15);
  }

  TEST_CASE("determinism") {
    const EnsembleSpec s = small_spec(77);
    const Ensemble a = draw_ensemble(s);
    const Ensemble b = draw_ensemble(s);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.profiles.size(); ++i) CHECK(a.profiles[i].phase == b.profiles[i].phase);
    const auto ra = renyi2_correlator(a);
    const auto rb = renyi2_correlator(b);
    for (std::size_t i = 0; i < ra.values.size(); ++i) CHECK(std::abs(ra.values[i] - rb.values[i]) <= 1e-12);
    const auto ga = linear_correlator(a, LinearOperator::G);
    const auto gb = linear_correlator(b, LinearOperator::G);
    for (std::size_t i = 0; i < ga.values.size(); ++i) CHECK(std::abs(ga.values[i] - gb.values[i]) <= 1e-12);
    CHECK(sample_mass_profile(s, 5).phase != sample_mass_profile(small_spec(78), 5).phase);
  }

  TEST_CASE("G correlator matrix is Hermitian") {
    const Ensemble e = draw_ensemble(small_spec(12));
    const Matrix<Complex> m = linear_correlator_matrix(e, LinearOperator::G);
    CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("single-member Renyi-2 is the squared linear correlator") {
    Ensemble e = draw_ensemble(small_spec(31));
    e.states.resize(1);
    e.profiles.resize(1);
    e.windings.resize(1);
    const CorrelatorEstimate r = renyi2_correlator(e);
    const auto& s = e.states.front();
    const Index n = e.spec.sites;
    for (Index d = 1; d <= n / 2; ++d) {
      double acc = 0.0;
      for (Index y = 0; y < n; ++y)
        for (Index yp : {(y + d) % n, (y - d + n) % n}) {
          const Complex v = wick_expectation(s, {cdag(mode_index(yp, Component::Left)), c(mode_index(y, Component::Left))});
          acc += std::norm(v);
        }
      CHECK(std::abs(r.values[static_cast<std::size_t>(d - 1)].real() - acc / (2.0 * static_cast<double>(n))) < 1e-12);
    }
    CHECK(std::abs(renyi2_bilinear({s}, {1.0}, 3, 6) -
                   std::norm(wick_expectation(s, {cdag(3), c(6)}))) < 1e-12);
  }

  TEST_CASE("Renyi-2 is invariant under per-sample orbital rotations") {
    Ensemble e = draw_ensemble(small_spec(41));
    const CorrelatorEstimate before = renyi2_correlator(e);
    Engine eng(derive_seed(41, "test-rotate"));
    for (auto& s : e.states) s = SlaterState<Complex>(s.orbitals() * random_unitary(s.particles(), eng));
    const CorrelatorEstimate after = renyi2_correlator(e);
    for (std::size_t i = 0; i < before.values.size(); ++i) CHECK(std::abs(before.values[i] - after.values[i]) < 1e-10);
  }

  TEST_CASE("Renyi-2 estimator against exact density matrix") {
    EnsembleSpec s = small_spec(5);
    s.sites = 4;
    s.samples = 5;
    s.mass = 1.0;
    s.fit_max = 2;
    s.winding = WindingRule{{0, 1}, {0.5, 0.5}};
    const Ensemble e = draw_ensemble(s);
    const CorrelatorEstimate r = renyi2_correlator(e);
    const FockSpace space(8);
    std::vector<FockVector> fv;
    for (const auto& st : e.states) fv.push_back(slater_to_fock(st, space));
    const DensityMatrixED rho = assemble_density_matrix(fv, std::vector<double>(fv.size(), 1.0 / static_cast<double>(fv.size())));
    for (Index d = 1; d <= 2; ++d) {
      double acc = 0.0;
      for (Index y = 0; y < 4; ++y)
        for (Index yp : {(y + d) % 4, (y - d + 4) % 4}) {
          const FockMatrix a = operator_matrix(space, {cdag(mode_index(yp, Component::Left)), c(mode_index(y, Component::Left))});
          acc += ((rho.matrix() * a * rho.matrix() * a.adjoint()).trace() / rho.purity()).real();
        }
      CHECK(std::abs(r.values[static_cast<std::size_t>(d - 1)].real() - acc / 8.0) < 1e-10);
    }
  }

  TEST_CASE("winding charge report") {
    EnsembleSpec s = small_spec(1);
    s.winding = WindingRule{{0, 1}, {0.5, 0.5}};
    WindingChargeReport r = winding_charge_report(s);
    CHECK(r.reference == 16);
    CHECK(r.charges.at(1) == 17);
    CHECK(r.strong_symmetry_broken);
    s.winding = WindingRule::fixed(0);
    CHECK_FALSE(winding_charge_report(s).strong_symmetry_broken);
    s.winding = WindingRule{{-1, 1}, {0.5, 0.5}};
    r = winding_charge_report(s);
    CHECK(r.charges.at(-1) == 15);
    CHECK(r.charges.at(1) == 17);
  }

  TEST_CASE("mixture members carry the drawn sector charge") {
    EnsembleSpec s = small_spec(8);
    s.winding = WindingRule{{0, 1}, {0.5, 0.5}};
    const Ensemble e = draw_ensemble(s);
    for (std::size_t i = 0; i < e.states.size(); ++i) CHECK(e.states[i].particles() == 16 + e.windings[i]);
  }
}
