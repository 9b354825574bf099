#ifndef MSLAB_GAUSSIAN_CORE_HPP
#define MSLAB_GAUSSIAN_CORE_HPP

#include <cmath>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mslab/errors.hpp"
#include "mslab/types.hpp"

namespace mslab {

// Complex mass m(y) = magnitude(y) * exp(i phase(y)) on a ring of N sites.
struct MassProfile {
  std::vector<double> magnitude;
  std::vector<double> phase;
  int winding = 0;

  Index sites() const { return static_cast<Index>(magnitude.size()); }
  Complex mass(Index y) const { return std::polar(magnitude[static_cast<std::size_t>(y)], phase[static_cast<std::size_t>(y)]); }

  // |m| constant, phase 2 pi w y / N + offset.
  static MassProfile uniform(Index sites, double magnitude, int winding, double offset = 0.0);
};

// Sum of principal-branch phase increments around the ring, over 2 pi.
int lattice_winding(const std::vector<double>& phase);

struct EdgeModel {
  Index sites = 64;
  double velocity = 1.0;
  double wilson = 1.0;
  double twist = 0.0;  // phase on the bond closing the ring
};

// Two components per site: R (tau^z = +1) and L (tau^z = -1).
enum class Component : int { Right = 0, Left = 1 };

inline Index mode_index(Index site, Component c) { return 2 * site + static_cast<Index>(c); }

template <typename Scalar>
struct SingleParticleHamiltonian {
  Matrix<Scalar> h;
  Index sites = 0;
  double velocity = 1.0;
  double wilson = 0.0;
  double twist = 0.0;

  Index dim() const { return h.rows(); }
};

// Lattice Dirac edge on a ring:
//   H = sum_y (i v / 2) (c+_y tau^z c_{y+1} - h.c.)
//     + sum_y c+_y [Re m tau^x + Im m tau^y] c_y          (tau^+ pairs L->R with conj(m))
//     + b sum_y [c+_y tau^x c_y - (1/2)(c+_y tau^x c_{y+1} + h.c.)]
// The bond (N-1 -> 0) carries exp(i twist). Throws PreconditionError for
// N < 2, a profile of the wrong length, or non-finite parameters.
SingleParticleHamiltonian<Complex> build_edge_hamiltonian(const EdgeModel& model, const MassProfile& profile);

double hermiticity_residual(const Matrix<Complex>& h);

// Orthonormal orbitals (columns) of a Slater determinant. The constructor
// checks U^dagger U = 1 to 1e-10.
template <typename Scalar>
class SlaterState {
 public:
  SlaterState() = default;
  explicit SlaterState(Matrix<Scalar> orbitals, double tol = 1e-10) : u_(std::move(orbitals)) {
    if (u_.cols() > u_.rows()) throw PreconditionError("more orbitals than modes");
    if (u_.cols() == 0) return;
    const double err = (u_.adjoint() * u_ - Matrix<Scalar>::Identity(u_.cols(), u_.cols())).cwiseAbs().maxCoeff();
    if (!(err <= tol)) throw PreconditionError("orbitals are not orthonormal");
  }

  const Matrix<Scalar>& orbitals() const { return u_; }
  Index modes() const { return u_.rows(); }
  Index particles() const { return u_.cols(); }

 private:
  Matrix<Scalar> u_;
};

template <typename Scalar>
Vector<double> spectrum(const SingleParticleHamiltonian<Scalar>& h) {
  return Eigen::SelfAdjointEigenSolver<Matrix<Scalar>>(h.h, Eigen::EigenvaluesOnly).eigenvalues();
}

// Fills every negative-energy orbital. Throws DegeneracyError when an
// eigenvalue lies within zero_tol of zero.
template <typename Scalar>
SlaterState<Scalar> ground_state(const SingleParticleHamiltonian<Scalar>& h, double zero_tol = 1e-9) {
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(h.h);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  const auto& e = es.eigenvalues();
  Index p = 0;
  for (Index i = 0; i < e.size(); ++i) {
    if (std::abs(e(i)) < zero_tol)
      throw DegeneracyError("zero mode at energy " + std::to_string(e(i)) + "; ground state is ambiguous", e(i));
    if (e(i) < 0) ++p;
  }
  return SlaterState<Scalar>(es.eigenvectors().leftCols(p));
}

template <typename Scalar>
void check_compatible(const SlaterState<Scalar>& s1, const SlaterState<Scalar>& s2) {
  if (s1.modes() != s2.modes() || s1.particles() != s2.particles())
    throw PreconditionError("Slater states differ in mode count or particle number");
}

// <S1|S2> = det(U1^dagger U2)
template <typename Scalar>
Scalar overlap(const SlaterState<Scalar>& s1, const SlaterState<Scalar>& s2) {
  check_compatible(s1, s2);
  if (s1.particles() == 0) return Scalar(1);
  return (s1.orbitals().adjoint() * s2.orbitals()).eval().partialPivLu().determinant();
}

// C_ab = <c+_a c_b>
template <typename Scalar>
Matrix<Scalar> correlation_matrix(const SlaterState<Scalar>& s) {
  return s.orbitals().conjugate() * s.orbitals().transpose();
}

enum class TransitionPath { Inverse, Adjugate, Vanishing };

std::string to_string(TransitionPath p);

template <typename Scalar>
struct Transition {
  Scalar value{};
  TransitionPath path = TransitionPath::Inverse;
};

// Transition density matrix D with <S1|c+_a c_b|S2> = D(b, a):
//   D = V adj(U^dagger V) U^dagger.
// The inverse path uses adj(A) = det(A) A^{-1}; when A is near singular the
// adjugate comes from the SVD A = X S W^dagger instead,
//   adj(A) = det(X) conj(det(W)) W adj(S) X^dagger,
// which stays exact when the states differ by one orbital. Two or more
// vanishing singular values make every one-body element zero.
template <typename Scalar>
struct TransitionKernel {
  Matrix<Scalar> adj;  // adj(U1^dagger U2), P x P
  Scalar det = Scalar(1);  // det(U1^dagger U2) = <S1|S2>
  TransitionPath path = TransitionPath::Inverse;
};

template <typename Scalar>
TransitionKernel<Scalar> transition_kernel(const SlaterState<Scalar>& s1, const SlaterState<Scalar>& s2,
                                           double rcond_min = 1e-10) {
  check_compatible(s1, s2);
  const Index p = s1.particles();
  TransitionKernel<Scalar> out;
  if (p == 0) {
    out.adj = Matrix<Scalar>::Zero(0, 0);
    return out;
  }
  const Matrix<Scalar> a = s1.orbitals().adjoint() * s2.orbitals();
  Eigen::PartialPivLU<Matrix<Scalar>> lu(a);
  out.det = lu.determinant();
  if (lu.rcond() >= rcond_min) {
    out.adj = out.det * lu.inverse();
    return out;
  }
  Eigen::JacobiSVD<Matrix<Scalar>> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector<double> sigma = svd.singularValues();  // descending
  if (p >= 2 && sigma(p - 2) < 1e-12) {
    out.adj = Matrix<Scalar>::Zero(p, p);
    out.path = TransitionPath::Vanishing;
    return out;
  }
  Vector<Scalar> adj_s(p);
  for (Index i = 0; i < p; ++i) {
    Scalar prod(1);
    for (Index j = 0; j < p; ++j)
      if (j != i) prod *= Scalar(sigma(j));
    adj_s(i) = prod;
  }
  const Matrix<Scalar>& x = svd.matrixU();
  const Matrix<Scalar>& w = svd.matrixV();
  const Scalar phase = x.partialPivLu().determinant() * Eigen::numext::conj(w.partialPivLu().determinant());
  out.adj = phase * (w * adj_s.asDiagonal() * x.adjoint());
  out.path = TransitionPath::Adjugate;
  return out;
}

template <typename Scalar>
struct TransitionDensity {
  Matrix<Scalar> d;
  TransitionPath path = TransitionPath::Inverse;
};

template <typename Scalar>
TransitionDensity<Scalar> transition_density(const SlaterState<Scalar>& s1, const SlaterState<Scalar>& s2) {
  const auto k = transition_kernel(s1, s2);
  if (s1.particles() == 0) return {Matrix<Scalar>::Zero(s1.modes(), s1.modes()), k.path};
  return {s2.orbitals() * k.adj * s1.orbitals().adjoint(), k.path};
}

// <S1| c+_a c_b |S2>
template <typename Scalar>
Transition<Scalar> transition_bilinear(const SlaterState<Scalar>& s1, const SlaterState<Scalar>& s2, Index a,
                                       Index b) {
  if (a < 0 || b < 0 || a >= s1.modes() || b >= s1.modes()) throw PreconditionError("mode index out of range");
  const auto t = transition_density(s1, s2);
  return {t.d(b, a), t.path};
}

struct Ladder {
  Index mode = 0;
  bool dagger = false;
};

using OperatorString = std::vector<Ladder>;

inline Ladder cdag(Index mode) { return {mode, true}; }
inline Ladder c(Index mode) { return {mode, false}; }

// <S| op_1 op_2 ... |S> for strings of at most four ladder operators, by
// Wick's theorem over the correlation matrix. Number-changing strings give 0.
template <typename Scalar>
Scalar wick_expectation(const Matrix<Scalar>& corr, const OperatorString& ops) {
  if (ops.size() > 4) throw PreconditionError("Wick evaluation supports at most four ladder operators");
  for (const auto& o : ops)
    if (o.mode < 0 || o.mode >= corr.rows()) throw PreconditionError("mode index out of range");
  int balance = 0;
  for (const auto& o : ops) balance += o.dagger ? 1 : -1;
  if (balance != 0) return Scalar(0);
  if (ops.empty()) return Scalar(1);
  auto pair = [&](const Ladder& x, const Ladder& y) -> Scalar {
    if (x.dagger && !y.dagger) return corr(x.mode, y.mode);
    if (!x.dagger && y.dagger) return Scalar(x.mode == y.mode ? 1 : 0) - corr(y.mode, x.mode);
    return Scalar(0);
  };
  if (ops.size() == 2) return pair(ops[0], ops[1]);
  return pair(ops[0], ops[1]) * pair(ops[2], ops[3]) - pair(ops[0], ops[2]) * pair(ops[1], ops[3]) +
         pair(ops[0], ops[3]) * pair(ops[1], ops[2]);
}

template <typename Scalar>
Scalar wick_expectation(const SlaterState<Scalar>& s, const OperatorString& ops) {
  return wick_expectation(correlation_matrix(s), ops);
}

struct SpectralFlowRow {
  int winding = 0;
  Index particles = 0;
  Index delta_charge = 0;  // particles(w) - particles(0)
  double gap = 0.0;        // smallest |E|
};

// Ground-state charge for uniform-|m| profiles of each winding. A zero mode
// at any winding throws DegeneracyError carrying that winding.
std::vector<SpectralFlowRow> spectral_flow_charge(const EdgeModel& model, double magnitude,
                                                  const std::vector<int>& windings);

// One "row,col,re,im" line per nonzero entry, preceded by "# rows cols".
void write_matrix_csv(std::ostream& os, const Matrix<Complex>& m);

}  // namespace mslab

#endif  // MSLAB_GAUSSIAN_CORE_HPP
