#include "mslab/edge_ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>

#include "mslab/errors.hpp"
#include "mslab/random.hpp"

namespace mslab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ssr += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  return f;
}

}  // namespace

bool WindingRule::is_mixture() const {
  std::size_t live = 0;
  for (double p : probabilities)
    if (p > 0.0) ++live;
  return live > 1;
}

void EnsembleSpec::validate() const {
  if (sites < 4) throw PreconditionError("sites: ensemble ring needs at least 4 sites");
  if (samples < 2) throw PreconditionError("samples: ensemble needs K >= 2");
  if (!(mass >= 0.0) || !std::isfinite(mass)) throw PreconditionError("mass: must be finite and >= 0");
  if (!(stiffness >= 0.0) || !std::isfinite(stiffness)) throw PreconditionError("stiffness: must be finite and >= 0");
  if (!std::isfinite(wilson)) throw PreconditionError("wilson: must be finite");
  if (!std::isfinite(velocity)) throw PreconditionError("velocity: must be finite");
  if (winding.windings.empty() || winding.windings.size() != winding.probabilities.size())
    throw PreconditionError("winding: sector and probability lists must be nonempty and of equal length");
  double total = 0.0;
  for (double p : winding.probabilities) {
    if (!(p >= 0.0)) throw PreconditionError("winding: probabilities must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw PreconditionError("winding: probabilities must sum to 1");
  if (pair_budget < 1) throw PreconditionError("pair_budget: must be >= 1");
  if (fit_min < 1 || fit_upper() < fit_min || fit_upper() > sites / 2)
    throw PreconditionError("fit_min: fit window needs 1 <= fit_min <= fit_max <= sites/2");
}

std::string to_string(FitRecord::Model m) { return m == FitRecord::Model::Power ? "power" : "exponential"; }

std::string to_string(LinearOperator op) { return op == LinearOperator::G ? "G" : "S"; }

FitRecord fit_decay(const std::vector<Index>& distances, const std::vector<double>& values, Index window_min,
                    Index window_max) {
  if (distances.size() != values.size()) throw PreconditionError("fit series length mismatch");
  std::vector<double> ld, d, ly;
  Index in_window = 0;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    if (distances[i] < window_min || distances[i] > window_max) continue;
    ++in_window;
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) continue;
    d.push_back(static_cast<double>(distances[i]));
    ld.push_back(std::log(static_cast<double>(distances[i])));
    ly.push_back(std::log(values[i]));
  }
  if (in_window < 6) throw PreconditionError("fit window holds fewer than 6 distance bins");
  if (d.size() < 4) throw FitError("fewer than 4 positive bins remain in the fit window");
  const LinearFit pw = least_squares(ld, ly);
  const LinearFit ex = least_squares(d, ly);
  FitRecord r;
  r.exponent = -pw.slope;
  r.length = ex.slope < 0.0 ? -1.0 / ex.slope : std::numeric_limits<double>::infinity();
  r.r2_power = pw.r2;
  r.r2_exponential = ex.r2;
  r.model = pw.r2 >= ex.r2 ? FitRecord::Model::Power : FitRecord::Model::Exponential;
  r.margin = std::abs(pw.r2 - ex.r2);
  r.window_min = window_min;
  r.window_max = window_max;
  r.bins_used = static_cast<Index>(d.size());
  return r;
}

MassProfile sample_mass_profile(const EnsembleSpec& spec, std::uint64_t index) {
  Engine eng(derive_seed(spec.seed, "mass-profile", index));
  const Index n = spec.sites;
  const double u = uniform01(eng);
  int w = spec.winding.windings.back();
  double acc = 0.0;
  for (std::size_t i = 0; i < spec.winding.windings.size(); ++i) {
    acc += spec.winding.probabilities[i];
    if (u < acc) {
      w = spec.winding.windings[i];
      break;
    }
  }
  const double offset = kTwoPi * uniform01(eng);
  MassProfile p = MassProfile::uniform(n, spec.mass, w, offset);
  const Index kc = n / 4;
  for (Index k = 1; k <= kc; ++k) {
    const double a = standard_normal(eng);
    const double b = standard_normal(eng);
    const double s = std::sqrt(spec.stiffness / static_cast<double>(k));
    for (Index y = 0; y < n; ++y) {
      const double t = kTwoPi * static_cast<double>(k * y) / static_cast<double>(n);
      p.phase[static_cast<std::size_t>(y)] += s * (a * std::cos(t) + b * std::sin(t));
    }
  }
  return p;
}

Ensemble draw_ensemble(const EnsembleSpec& spec) {
  spec.validate();
  Ensemble ens;
  ens.spec = spec;
  const EdgeModel model{spec.sites, spec.velocity, spec.wilson, 0.0};
  const Index cap = 3 * spec.samples;
  for (Index t = 0; t < cap && ens.size() < spec.samples; ++t) {
    ++ens.draws;
    MassProfile p = sample_mass_profile(spec, static_cast<std::uint64_t>(t));
    if (lattice_winding(p.phase) != p.winding) {
      ++ens.rejected_winding;
      continue;
    }
    try {
      SlaterState<Complex> s = ground_state(build_edge_hamiltonian(model, p));
      if (s.particles() != spec.sites + p.winding) {
        ++ens.rejected_charge;
        continue;
      }
      ens.windings.push_back(p.winding);
      ens.states.push_back(std::move(s));
      ens.profiles.push_back(std::move(p));
    } catch (const DegeneracyError&) {
      ++ens.rejected_gapless;
    }
  }
  if (2 * ens.size() < spec.samples)
    throw EnsembleError("only " + std::to_string(ens.size()) + " of " + std::to_string(spec.samples) +
                        " ensemble members are valid after " + std::to_string(ens.draws) + " draws");
  return ens;
}

std::vector<Complex> ring_bins(const Matrix<Complex>& m) {
  const Index n = m.rows();
  std::vector<Complex> out(static_cast<std::size_t>(n / 2));
  for (Index d = 1; d <= n / 2; ++d) {
    Complex acc(0.0);
    for (Index y = 0; y < n; ++y) acc += m(y, (y + d) % n);
    out[static_cast<std::size_t>(d - 1)] = acc / static_cast<double>(n);
  }
  return out;
}

std::vector<Complex> ring_bins_symmetric(const Matrix<Complex>& m) {
  const Index n = m.rows();
  std::vector<Complex> out(static_cast<std::size_t>(n / 2));
  for (Index d = 1; d <= n / 2; ++d) {
    Complex acc(0.0);
    for (Index y = 0; y < n; ++y) acc += m(y, (y + d) % n) + m(y, (y - d + n) % n);
    out[static_cast<std::size_t>(d - 1)] = acc / (2.0 * static_cast<double>(n));
  }
  return out;
}

namespace {

std::vector<Index> bin_distances(Index n) {
  std::vector<Index> d(static_cast<std::size_t>(n / 2));
  std::iota(d.begin(), d.end(), Index{1});
  return d;
}

Matrix<Complex> sample_matrix(const Matrix<Complex>& c, Index n, LinearOperator op) {
  Matrix<Complex> m(n, n);
  const auto R = [](Index y) { return mode_index(y, Component::Right); };
  const auto L = [](Index y) { return mode_index(y, Component::Left); };
  for (Index y = 0; y < n; ++y) {
    for (Index yp = 0; yp < n; ++yp) {
      if (op == LinearOperator::S) {
        m(y, yp) = c(L(yp), L(y));
      } else {
        const Complex delta = (y == yp) ? Complex(1.0) : Complex(0.0);
        m(y, yp) = c(L(yp), R(yp)) * c(R(y), L(y)) + c(L(yp), L(y)) * (delta - c(R(y), R(yp)));
      }
    }
  }
  return m;
}

void attach_fit(CorrelatorEstimate& est, const EnsembleSpec& spec) {
  std::vector<double> mag;
  for (const auto& v : est.values) mag.push_back(std::abs(v));
  try {
    est.fit = fit_decay(est.distances, mag, spec.fit_min, spec.fit_upper());
  } catch (const std::exception& e) {
    est.fit_error = e.what();
  }
}

}  // namespace

Matrix<Complex> linear_correlator_matrix(const Ensemble& ensemble, LinearOperator op) {
  const Index n = ensemble.spec.sites;
  const double k = static_cast<double>(ensemble.size());
  Matrix<Complex> mean = Matrix<Complex>::Zero(n, n);
  Vector<Complex> gbar = Vector<Complex>::Zero(n);
  for (const auto& s : ensemble.states) {
    const Matrix<Complex> c = correlation_matrix(s);
    mean += sample_matrix(c, n, op) / k;
    for (Index y = 0; y < n; ++y) gbar(y) += c(mode_index(y, Component::Right), mode_index(y, Component::Left)) / k;
  }
  if (op == LinearOperator::G) mean -= gbar * gbar.adjoint();
  return mean;
}

CorrelatorEstimate linear_correlator(const Ensemble& ensemble, LinearOperator op) {
  const Index n = ensemble.spec.sites;
  const Index k = ensemble.size();
  if (k < 1) throw EnsembleError("empty ensemble");
  const auto dist = bin_distances(n);
  std::vector<std::vector<Complex>> per_sample;
  for (const auto& s : ensemble.states) per_sample.push_back(ring_bins(sample_matrix(correlation_matrix(s), n, op)));

  CorrelatorEstimate est;
  est.distances = dist;
  est.values = ring_bins(linear_correlator_matrix(ensemble, op));
  est.stderrs.assign(dist.size(), 0.0);
  for (std::size_t b = 0; b < dist.size(); ++b) {
    Complex mean(0.0);
    for (const auto& ps : per_sample) mean += ps[b];
    mean /= static_cast<double>(k);
    double var = 0.0;
    for (const auto& ps : per_sample) var += std::norm(ps[b] - mean);
    if (k > 1) est.stderrs[b] = std::sqrt(var / static_cast<double>(k - 1) / static_cast<double>(k));
  }
  est.n_valid = k;
  est.n_rejected = ensemble.rejected();
  attach_fit(est, ensemble.spec);
  return est;
}

CorrelatorEstimate renyi2_correlator(const Ensemble& ensemble) {
  const Index n = ensemble.spec.sites;
  const Index k = ensemble.size();
  if (k < 1) throw EnsembleError("empty ensemble");
  const auto dist = bin_distances(n);
  const std::size_t nb = dist.size();

  // Orbital rows of the L components, one block per member.
  std::vector<Matrix<Complex>> left_rows;
  for (const auto& s : ensemble.states) {
    Matrix<Complex> u(n, s.particles());
    for (Index y = 0; y < n; ++y) u.row(y) = s.orbitals().row(mode_index(y, Component::Left));
    left_rows.push_back(std::move(u));
  }

  std::vector<std::vector<double>> num_k(static_cast<std::size_t>(k), std::vector<double>(nb, 0.0));
  std::vector<double> den_k(static_cast<std::size_t>(k), 0.0);
  std::vector<double> num(nb, 0.0);
  double den = 0.0;

  auto add = [&](Index i, Index j, const std::vector<Complex>& bins, double overlap2, double weight) {
    for (std::size_t b = 0; b < nb; ++b) {
      const double v = weight * bins[b].real();
      num[b] += v;
      num_k[static_cast<std::size_t>(i)][b] += v;
      if (j != i) num_k[static_cast<std::size_t>(j)][b] += v;
    }
    den += weight * overlap2;
    den_k[static_cast<std::size_t>(i)] += weight * overlap2;
    if (j != i) den_k[static_cast<std::size_t>(j)] += weight * overlap2;
  };

  for (Index i = 0; i < k; ++i) {
    const Matrix<Complex> d = left_rows[static_cast<std::size_t>(i)].conjugate() *
                              left_rows[static_cast<std::size_t>(i)].transpose();  // C_LL(y', y) at (y', y)
    add(i, i, ring_bins_symmetric(d.cwiseAbs2().cast<Complex>()), 1.0, 1.0);
  }

  const double unordered = 0.5 * static_cast<double>(k) * static_cast<double>(k - 1);
  const double pi = unordered > 0.0 ? std::min(1.0, 0.5 * static_cast<double>(ensemble.spec.pair_budget) / unordered) : 1.0;
  for (Index i = 0; i < k; ++i) {
    for (Index j = i + 1; j < k; ++j) {
      if (pi < 1.0) {
        Engine eng(derive_seed(ensemble.spec.seed, "renyi-pair", static_cast<std::uint64_t>(i),
                               static_cast<std::uint64_t>(j)));
        if (uniform01(eng) >= pi) continue;
      }
      const auto& si = ensemble.states[static_cast<std::size_t>(i)];
      const auto& sj = ensemble.states[static_cast<std::size_t>(j)];
      if (si.particles() != sj.particles()) continue;  // different charge sectors: every term vanishes
      const auto ker = transition_kernel(si, sj);
      // <m_i| c+_{L y'} c_{L y} |m_j> at (y, y')
      const Matrix<Complex> t =
          left_rows[static_cast<std::size_t>(j)] * ker.adj * left_rows[static_cast<std::size_t>(i)].adjoint();
      add(i, j, ring_bins_symmetric(t.cwiseAbs2().cast<Complex>()), std::norm(ker.det), 2.0 / pi);
    }
  }

  const double kk = static_cast<double>(k);
  if (den / (kk * kk) < 1e-12)
    throw EnsembleError("Renyi-2 denominator below 1e-12; members are nearly orthogonal (raise |m| or lower N)");

  CorrelatorEstimate est;
  est.distances = dist;
  est.values.resize(nb);
  est.stderrs.assign(nb, 0.0);
  for (std::size_t b = 0; b < nb; ++b) est.values[b] = num[b] / den;
  if (k > 1) {
    for (std::size_t b = 0; b < nb; ++b) {
      std::vector<double> loo(static_cast<std::size_t>(k));
      for (std::size_t s = 0; s < loo.size(); ++s) loo[s] = (num[b] - num_k[s][b]) / (den - den_k[s]);
      const double m = std::accumulate(loo.begin(), loo.end(), 0.0) / kk;
      double var = 0.0;
      for (double x : loo) var += (x - m) * (x - m);
      est.stderrs[b] = std::sqrt((kk - 1.0) / kk * var);
    }
  }
  est.n_valid = k;
  est.n_rejected = ensemble.rejected();
  attach_fit(est, ensemble.spec);
  return est;
}

double renyi2_bilinear(const std::vector<SlaterState<Complex>>& states, const std::vector<double>& weights, Index a,
                       Index b) {
  if (states.empty() || states.size() != weights.size()) throw PreconditionError("states and weights must match");
  Complex num(0.0);
  double den = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = 0; j < states.size(); ++j) {
      if (states[i].particles() != states[j].particles()) continue;
      const double w = weights[i] * weights[j];
      const auto tij = transition_density(states[i], states[j]);
      const auto tji = transition_density(states[j], states[i]);
      const auto ov = transition_kernel(states[i], states[j]).det;
      // <m|c+_a c_b|m'> = D_ij(b, a), <m'|c+_b c_a|m> = D_ji(a, b)
      num += w * tij.d(b, a) * tji.d(a, b);
      den += w * std::norm(ov);
    }
  }
  if (den < 1e-12) throw EnsembleError("Renyi-2 denominator below 1e-12");
  return num.real() / den;
}

WindingChargeReport winding_charge_report(const EnsembleSpec& spec) {
  spec.validate();
  const EdgeModel model{spec.sites, spec.velocity, spec.wilson, 0.0};
  auto charge = [&](int w) {
    try {
      return ground_state(build_edge_hamiltonian(model, MassProfile::uniform(spec.sites, spec.mass, w))).particles();
    } catch (const DegeneracyError& e) {
      throw DegeneracyError("zero mode in winding sector " + std::to_string(w), e.eigenvalue(), w);
    }
  };
  WindingChargeReport r;
  r.reference = charge(0);
  std::set<Index> distinct;
  for (std::size_t i = 0; i < spec.winding.windings.size(); ++i) {
    if (spec.winding.probabilities[i] <= 0.0) continue;
    const int w = spec.winding.windings[i];
    r.charges[w] = charge(w);
    distinct.insert(r.charges[w]);
  }
  r.strong_symmetry_broken = distinct.size() >= 2;
  return r;
}

}  // namespace mslab
