#include "mslab/ed_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>

#include "mslab/errors.hpp"

namespace mslab {

FockSpace::FockSpace(Index modes, std::optional<Index> particles) : modes_(modes), particles_(particles) {
  if (modes < 0) throw PreconditionError("negative mode count");
  if (modes > kMaxFockModes)
    throw CapacityError("Fock space limited to 14 modes, got " + std::to_string(modes));
  if (particles && (*particles < 0 || *particles > modes)) throw PreconditionError("particle number out of range");
  const std::uint32_t full = std::uint32_t{1} << modes;
  lookup_.assign(full, -1);
  for (std::uint32_t w = 0; w < full; ++w) {
    if (particles && std::popcount(w) != *particles) continue;
    lookup_[w] = static_cast<Index>(words_.size());
    words_.push_back(w);
  }
}

Index FockSpace::index_of(std::uint32_t word) const {
  if (word >= lookup_.size()) return -1;
  return lookup_[word];
}

namespace {

// Applies one ladder operator to a basis word. Returns false for a zero result.
bool apply_ladder(std::uint32_t& word, int& sign, const Ladder& op) {
  const std::uint32_t bit = std::uint32_t{1} << op.mode;
  const bool occupied = (word & bit) != 0;
  if (op.dagger == occupied) return false;
  if (std::popcount(word & (bit - 1)) % 2 != 0) sign = -sign;
  word ^= bit;
  return true;
}

}  // namespace

FockVector slater_to_fock(const SlaterState<Complex>& s, const FockSpace& space) {
  if (s.modes() != space.modes()) throw PreconditionError("Slater state and Fock space differ in mode count");
  const Index p = s.particles();
  FockVector out = FockVector::Zero(space.dim());
  for (Index i = 0; i < space.dim(); ++i) {
    const std::uint32_t w = space.word(i);
    if (std::popcount(w) != p) continue;
    if (p == 0) {
      out(i) = 1.0;
      continue;
    }
    Matrix<Complex> sub(p, p);
    Index r = 0;
    for (Index j = 0; j < space.modes(); ++j)
      if (w & (std::uint32_t{1} << j)) sub.row(r++) = s.orbitals().row(j);
    out(i) = sub.partialPivLu().determinant();
  }
  return out;
}

FockVector apply_string(const FockSpace& space, const OperatorString& ops, const FockVector& psi) {
  if (psi.size() != space.dim()) throw PreconditionError("state dimension does not match the Fock space");
  for (const auto& o : ops)
    if (o.mode < 0 || o.mode >= space.modes()) throw PreconditionError("mode index out of range");
  FockVector out = FockVector::Zero(space.dim());
  for (Index i = 0; i < space.dim(); ++i) {
    if (psi(i) == Complex(0.0)) continue;
    std::uint32_t w = space.word(i);
    int sign = 1;
    bool alive = true;
    for (auto it = ops.rbegin(); it != ops.rend() && alive; ++it) alive = apply_ladder(w, sign, *it);
    if (!alive) continue;
    const Index j = space.index_of(w);
    if (j < 0) throw PreconditionError("operator string leaves the Fock sector");
    out(j) += static_cast<double>(sign) * psi(i);
  }
  return out;
}

FockMatrix operator_matrix(const FockSpace& space, const OperatorString& ops) {
  FockMatrix m = FockMatrix::Zero(space.dim(), space.dim());
  for (Index i = 0; i < space.dim(); ++i) {
    std::uint32_t w = space.word(i);
    int sign = 1;
    bool alive = true;
    for (auto it = ops.rbegin(); it != ops.rend() && alive; ++it) alive = apply_ladder(w, sign, *it);
    if (!alive) continue;
    const Index j = space.index_of(w);
    if (j < 0) throw PreconditionError("operator string leaves the Fock sector");
    m(j, i) += static_cast<double>(sign);
  }
  return m;
}

DensityMatrixED::DensityMatrixED(FockMatrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() == 0) throw PreconditionError("density matrix must be square");
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw PreconditionError("density matrix is not Hermitian");
  if (std::abs(rho_.trace() - Complex(1.0)) > 1e-12) throw PreconditionError("density matrix trace differs from 1");
  const double lo = Eigen::SelfAdjointEigenSolver<FockMatrix>(rho_, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  if (lo < -1e-12) throw PreconditionError("density matrix has a negative eigenvalue");
}

double DensityMatrixED::purity() const { return rho_.cwiseAbs2().sum(); }

DensityMatrixED assemble_density_matrix(const std::vector<FockVector>& states, const std::vector<double>& weights) {
  if (states.empty() || states.size() != weights.size()) throw PreconditionError("states and weights must match");
  const Index d = states.front().size();
  if (d > (Index{1} << kMaxFockModes)) throw CapacityError("state dimension exceeds the 14-mode Fock space");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw PreconditionError("weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw PreconditionError("weights must sum to 1");
  FockMatrix rho = FockMatrix::Zero(d, d);
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (states[k].size() != d) throw PreconditionError("states differ in dimension");
    if (std::abs(states[k].norm() - 1.0) > 1e-12) throw PreconditionError("state is not normalized");
    rho.noalias() += weights[k] * states[k] * states[k].adjoint();
  }
  // Symmetrize away rounding before validation.
  rho = (0.5 * (rho + rho.adjoint())).eval();
  return DensityMatrixED(std::move(rho));
}

SymmetryOpED symmetry_op(const FockSpace& space, const std::string& name, const std::vector<double>& mode_weights,
                         double angle) {
  if (static_cast<Index>(mode_weights.size()) != space.modes())
    throw PreconditionError("one weight per mode required");
  SymmetryOpED op{name, angle, Vector<Complex>(space.dim())};
  for (Index i = 0; i < space.dim(); ++i) {
    double q = 0.0;
    for (Index j = 0; j < space.modes(); ++j)
      if (space.word(i) & (std::uint32_t{1} << j)) q += mode_weights[static_cast<std::size_t>(j)];
    op.diagonal(i) = std::polar(1.0, angle * q);
  }
  return op;
}

SymmetryOpED edge_charge_op(const FockSpace& space, double angle) {
  return symmetry_op(space, "charge", std::vector<double>(static_cast<std::size_t>(space.modes()), 1.0), angle);
}

SymmetryOpED edge_dipole_op(const FockSpace& space, double angle) {
  std::vector<double> w(static_cast<std::size_t>(space.modes()), 0.0);
  for (Index j = 0; j < space.modes(); ++j)
    if (j % 2 == static_cast<Index>(Component::Left)) w[static_cast<std::size_t>(j)] = 1.0;
  return symmetry_op(space, "dipole", w, angle);
}

SymmetryCheck strong_symmetry_check(const DensityMatrixED& rho, const SymmetryOpED& op, double tol) {
  if (op.diagonal.size() != rho.dim()) throw PreconditionError("operator and density matrix differ in dimension");
  const FockMatrix u_rho = op.diagonal.asDiagonal() * rho.matrix();
  const Complex t = u_rho.trace();
  SymmetryCheck r;
  if (std::abs(t) < 1e-12) {
    r.residual = u_rho.norm();
    r.pass = r.residual <= tol;
    if (!r.pass) r.diagnostic = "tr[U rho] vanishes while U rho does not: no global phase fits";
    return r;
  }
  r.phase = std::arg(t);
  r.residual = (u_rho - std::polar(1.0, r.phase) * rho.matrix()).norm();
  r.pass = r.residual <= tol;
  return r;
}

SymmetryCheck weak_symmetry_check(const DensityMatrixED& rho, const SymmetryOpED& op, double tol) {
  if (op.diagonal.size() != rho.dim()) throw PreconditionError("operator and density matrix differ in dimension");
  const FockMatrix conj_rho = op.diagonal.asDiagonal() * rho.matrix() * op.diagonal.conjugate().asDiagonal();
  SymmetryCheck r;
  r.residual = (conj_rho - rho.matrix()).norm();
  r.pass = r.residual <= tol;
  return r;
}

EprIdentity epr_renyi_identity(const DensityMatrixED& rho, const FockMatrix& a, const FockMatrix& b, double tol) {
  const FockMatrix& r = rho.matrix();
  const Index d = r.rows();
  if (a.rows() != d || a.cols() != d || b.rows() != d || b.cols() != d)
    throw PreconditionError("operators must act on the system space of rho");
  const double purity = rho.purity();
  if (purity < 1e-14) throw PreconditionError("tr[rho^2] below 1e-14");

  EprIdentity out;
  const FockMatrix ra = r * a;
  const FockMatrix rb = r * b;
  out.lhs = ra.cwiseProduct(rb.transpose()).sum() / purity;

  // Purification Psi(s, k) = sqrt(lambda_k) v_k(s) over the support of rho.
  Eigen::SelfAdjointEigenSolver<FockMatrix> es(r);
  std::vector<Index> support;
  for (Index k = 0; k < d; ++k)
    if (es.eigenvalues()(k) > 0.0) support.push_back(k);
  const Index rank = static_cast<Index>(support.size());
  FockMatrix psi(d, rank);
  for (Index k = 0; k < rank; ++k)
    psi.col(k) = std::sqrt(es.eigenvalues()(support[static_cast<std::size_t>(k)])) *
                 es.eigenvectors().col(support[static_cast<std::size_t>(k)]);

  // Project ancillas (a1, a2) of ket copy Psi and bra copy conj(Psi) onto
  // sum_a |a>|a>: Phi(s1, s2) = sum_a Psi(s1, a) conj(Psi(s2, a)).
  FockMatrix phi = FockMatrix::Zero(d, d);
  for (Index s1 = 0; s1 < d; ++s1)
    for (Index s2 = 0; s2 < d; ++s2) {
      Complex acc(0.0);
      for (Index k = 0; k < rank; ++k) acc += psi(s1, k) * std::conj(psi(s2, k));
      phi(s1, s2) = acc;
    }
  const double norm2 = phi.cwiseAbs2().sum();

  // (A (x) B^T) Phi as a matrix on (s1, s2) is A Phi B.
  const FockMatrix applied = a * phi * b;
  Complex num(0.0);
  for (Index s1 = 0; s1 < d; ++s1)
    for (Index s2 = 0; s2 < d; ++s2) num += std::conj(phi(s1, s2)) * applied(s1, s2);
  out.rhs = num / norm2;
  out.equal = std::abs(out.lhs - out.rhs) <= tol;
  return out;
}

FockVector choi_vector(const DensityMatrixED& rho) {
  const Index d = rho.dim();
  FockVector v(d * d);
  for (Index s1 = 0; s1 < d; ++s1)
    for (Index s2 = 0; s2 < d; ++s2) v(s1 * d + s2) = rho.matrix()(s1, s2);
  return v;
}

std::vector<ChargeSector> charge_sectors(const DensityMatrixED& rho, const FockSpace& space) {
  if (rho.dim() != space.dim()) throw PreconditionError("density matrix and Fock space differ in dimension");
  std::map<Index, double> w;
  for (Index i = 0; i < space.dim(); ++i) w[std::popcount(space.word(i))] += rho.matrix()(i, i).real();
  std::vector<ChargeSector> out;
  for (const auto& [q, x] : w)
    if (x > 1e-12) out.push_back({q, x});
  return out;
}

namespace {

Matrix<Complex> gaussian_matrix(Index rows, Index cols, Engine& eng) {
  Matrix<Complex> m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = standard_normal(eng);
      const double im = standard_normal(eng);
      m(i, j) = Complex(re, im);
    }
  return m;
}

Matrix<Complex> orthonormal_columns(const Matrix<Complex>& m) {
  Eigen::HouseholderQR<Matrix<Complex>> qr(m);
  return qr.householderQ() * Matrix<Complex>::Identity(m.rows(), m.cols());
}

}  // namespace

SlaterState<Complex> random_slater(Index modes, Index particles, Engine& eng) {
  if (particles < 0 || particles > modes) throw PreconditionError("particle number out of range");
  if (particles == 0) return SlaterState<Complex>(Matrix<Complex>::Zero(modes, 0));
  return SlaterState<Complex>(orthonormal_columns(gaussian_matrix(modes, particles, eng)));
}

SlaterState<Complex> random_gapped_ground_state(Index modes, Index particles, Engine& eng) {
  if (particles < 1 || particles >= modes) throw PreconditionError("need 0 < particles < modes");
  const Matrix<Complex> x = gaussian_matrix(modes, modes, eng);
  SingleParticleHamiltonian<Complex> h;
  h.h = 0.5 * (x + x.adjoint());
  const Vector<double> e = spectrum(h);
  const double mid = 0.5 * (e(particles - 1) + e(particles));
  h.h -= mid * Matrix<Complex>::Identity(modes, modes);
  return ground_state(h);
}

double CrosscheckReport::max_dev() const {
  return std::max({overlap_dev, transition_dev, wick_dev, renyi_dev});
}

CrosscheckReport crosscheck_gaussian(const SlaterState<Complex>& s1, const SlaterState<Complex>& s2,
                                     const std::vector<OperatorString>& wick_strings) {
  check_compatible(s1, s2);
  const Index m = s1.modes();
  const FockSpace space(m);
  const FockVector f1 = slater_to_fock(s1, space);
  const FockVector f2 = slater_to_fock(s2, space);
  CrosscheckReport r;

  r.overlap_dev = std::abs(overlap(s1, s2) - f1.dot(f2));
  ++r.checks;

  const auto t12 = transition_density(s1, s2);
  const auto t21 = transition_density(s2, s1);
  r.paths_seen.push_back(t12.path);
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < m; ++b) {
      const FockVector cab = apply_string(space, {cdag(a), c(b)}, f2);
      const Complex ed12 = f1.dot(cab);
      r.transition_dev = std::max(r.transition_dev, std::abs(t12.d(b, a) - ed12));
      // <S1|c+_a c_b|S2><S2|c+_b c_a|S1>
      const Complex ed21 = f2.dot(apply_string(space, {cdag(b), c(a)}, f1));
      r.renyi_dev = std::max(r.renyi_dev, std::abs(t12.d(b, a) * t21.d(a, b) - ed12 * ed21));
      r.checks += 2;
    }

  const Matrix<Complex> corr = correlation_matrix(s1);
  for (const auto& ops : wick_strings) {
    const Complex ed = f1.dot(apply_string(space, ops, f1));
    r.wick_dev = std::max(r.wick_dev, std::abs(wick_expectation(corr, ops) - ed));
    ++r.checks;
  }
  return r;
}

CrosscheckCase random_crosscheck_case(Index modes, int kind, Index strings, Engine& eng) {
  const Index p = modes / 2;
  const SlaterState<Complex> s1 = random_gapped_ground_state(modes, p, eng);
  SlaterState<Complex> s2;
  if (kind == 0) {
    s2 = random_gapped_ground_state(modes, p, eng);
  } else {
    // Keep p - kind orbitals of s1, complete with vectors orthogonal to all
    // of s1, then mix the orbitals by a random unitary.
    const Index keep = p - std::min<Index>(kind, p);
    Matrix<Complex> full(modes, modes);
    full.leftCols(p) = s1.orbitals();
    full.rightCols(modes - p) = gaussian_matrix(modes, modes - p, eng);
    const Matrix<Complex> q = orthonormal_columns(full);
    Matrix<Complex> orb(modes, p);
    orb.leftCols(keep) = q.leftCols(keep);
    orb.rightCols(p - keep) = q.block(0, p, modes, p - keep);
    const Matrix<Complex> mix = orthonormal_columns(gaussian_matrix(p, p, eng));
    s2 = SlaterState<Complex>(orb * mix);
  }
  std::vector<OperatorString> ws{{}};
  for (Index k = 0; k < strings; ++k) {
    OperatorString ops;
    const bool balanced = k % 4 != 3;
    for (int i = 0; i < 4; ++i) {
      const Index mode = static_cast<Index>(uniform_index(eng, static_cast<std::uint64_t>(modes)));
      const bool dagger = balanced ? (uniform_index(eng, 2) == 0) : true;
      ops.push_back({mode, dagger});
    }
    if (balanced) {
      // Force two creators and two annihilators in a random arrangement.
      int creators = 0;
      for (auto& o : ops) creators += o.dagger ? 1 : 0;
      for (auto& o : ops) {
        if (creators > 2 && o.dagger) { o.dagger = false; --creators; }
        else if (creators < 2 && !o.dagger) { o.dagger = true; ++creators; }
      }
    }
    ws.push_back(std::move(ops));
  }
  return {s1, s2, std::move(ws)};
}

CrosscheckReport random_crosscheck(Index modes, int kind, Index strings, Engine& eng) {
  const auto cc = random_crosscheck_case(modes, kind, strings, eng);
  return crosscheck_gaussian(cc.s1, cc.s2, cc.strings);
}

EdEnsemble build_ed_ensemble(const EnsembleSpec& spec, bool dipole_orbit) {
  const Ensemble ens = draw_ensemble(spec);
  EdEnsemble out;
  out.space = FockSpace(2 * spec.sites);
  out.windings = ens.windings;
  std::vector<FockVector> states;
  const Index orbit = dipole_orbit ? spec.sites + 1 : 1;
  std::vector<SymmetryOpED> rotations;
  for (Index k = 0; k < orbit; ++k)
    rotations.push_back(edge_dipole_op(out.space, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(orbit)));
  for (const auto& s : ens.states) {
    const FockVector f = slater_to_fock(s, out.space);
    for (const auto& u : rotations) states.push_back(u.diagonal.cwiseProduct(f));
  }
  out.members = static_cast<Index>(states.size());
  const std::vector<double> w(states.size(), 1.0 / static_cast<double>(states.size()));
  out.rho = assemble_density_matrix(states, w);
  return out;
}

}  // namespace mslab
