#ifndef MSLAB_ED_ORACLE_HPP
#define MSLAB_ED_ORACLE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mslab/edge_ensemble.hpp"
#include "mslab/gaussian_core.hpp"
#include "mslab/random.hpp"
#include "mslab/types.hpp"

namespace mslab {

inline constexpr Index kMaxFockModes = 14;

// Occupation-number basis. Bit j of a basis word is n_j (mode 0 is the least
// significant bit) and
//   |n> = (c+_0)^{n_0} (c+_1)^{n_1} ... |0>,
// so c+_j picks up (-1)^{sum_{i<j} n_i}. Words are stored in ascending order.
class FockSpace {
 public:
  explicit FockSpace(Index modes, std::optional<Index> particles = std::nullopt);

  Index modes() const { return modes_; }
  Index dim() const { return static_cast<Index>(words_.size()); }
  std::uint32_t word(Index i) const { return words_[static_cast<std::size_t>(i)]; }
  // -1 when the word is outside the space.
  Index index_of(std::uint32_t word) const;
  const std::optional<Index>& particles() const { return particles_; }

 private:
  Index modes_;
  std::optional<Index> particles_;
  std::vector<std::uint32_t> words_;
  std::vector<Index> lookup_;
};

using FockVector = Vector<Complex>;
using FockMatrix = Matrix<Complex>;

// Amplitude on |n> is det(U[occupied rows, :]).
FockVector slater_to_fock(const SlaterState<Complex>& s, const FockSpace& space);

// op_1 op_2 ... op_k |psi>, rightmost operator applied first.
FockVector apply_string(const FockSpace& space, const OperatorString& ops, const FockVector& psi);
FockMatrix operator_matrix(const FockSpace& space, const OperatorString& ops);

// Hermitian, unit trace and positive semidefinite, each to 1e-12, checked on
// construction (PreconditionError otherwise).
class DensityMatrixED {
 public:
  explicit DensityMatrixED(FockMatrix rho);
  const FockMatrix& matrix() const { return rho_; }
  Index dim() const { return rho_.rows(); }
  double purity() const;  // tr rho^2

 private:
  FockMatrix rho_;
};

DensityMatrixED assemble_density_matrix(const std::vector<FockVector>& states, const std::vector<double>& weights);

// exp(i angle sum_j weight_j n_j), diagonal in the occupation basis.
struct SymmetryOpED {
  std::string name;
  double angle = 0.0;
  Vector<Complex> diagonal;
};

SymmetryOpED symmetry_op(const FockSpace& space, const std::string& name, const std::vector<double>& mode_weights,
                         double angle);

// Charge (every mode weight 1) and dipole (R weight 0, L weight 1) rotations
// of an N-site edge ring, mode index 2 y + c.
SymmetryOpED edge_charge_op(const FockSpace& space, double angle);
SymmetryOpED edge_dipole_op(const FockSpace& space, double angle);

struct SymmetryCheck {
  bool pass = false;
  double residual = 0.0;
  double phase = 0.0;  // best-fit global phase (strong check only)
  std::string diagnostic;
};

// pass iff ||U rho - e^{i phi} rho||_F <= tol, phi = arg tr[U rho].
SymmetryCheck strong_symmetry_check(const DensityMatrixED& rho, const SymmetryOpED& op, double tol = 1e-10);
// pass iff ||U rho U^dagger - rho||_F <= tol.
SymmetryCheck weak_symmetry_check(const DensityMatrixED& rho, const SymmetryOpED& op, double tol = 1e-10);

struct EprIdentity {
  Complex lhs;
  Complex rhs;
  bool equal = false;
};

// lhs = tr[rho A rho B] / tr[rho^2].
// rhs: purify rho = Psi Psi^dagger with an ancilla of dimension rank(rho),
// take the ket copy Psi and the bra copy conj(Psi), project the two ancillas
// onto sum_a |a>|a>, and evaluate A (x) B^T on the normalised result.
EprIdentity epr_renyi_identity(const DensityMatrixED& rho, const FockMatrix& a, const FockMatrix& b, double tol = 1e-12);

// vec(rho) with index s1 * dim + s2.
FockVector choi_vector(const DensityMatrixED& rho);

struct ChargeSector {
  Index charge = 0;
  double weight = 0.0;
};

// Particle numbers carrying diagonal weight above 1e-12.
std::vector<ChargeSector> charge_sectors(const DensityMatrixED& rho, const FockSpace& space);

// Random orthonormal orbitals (QR of a complex Gaussian matrix).
SlaterState<Complex> random_slater(Index modes, Index particles, Engine& eng);
// Ground state at P particles of a random Hermitian matrix shifted so that
// exactly P levels are negative.
SlaterState<Complex> random_gapped_ground_state(Index modes, Index particles, Engine& eng);

struct CrosscheckReport {
  Index checks = 0;
  double overlap_dev = 0.0;
  double transition_dev = 0.0;
  double wick_dev = 0.0;
  double renyi_dev = 0.0;
  std::vector<TransitionPath> paths_seen;

  double max_dev() const;
};

// Overlap, every bilinear transition element, `wick_strings` four-point
// functions and two-sample Renyi-2 numerator terms of (s1, s2), Gaussian
// formulas against the Fock-space computation.
CrosscheckReport crosscheck_gaussian(const SlaterState<Complex>& s1, const SlaterState<Complex>& s2,
                                     const std::vector<OperatorString>& wick_strings);

// One randomized case on `modes` modes at half filling: a gapped ground
// state, a second state that is either independent, differs by a single
// orbital, or by two orbitals (`kind` = 0, 1, 2), and `strings` random
// four-operator strings (every fourth one number-changing) after the empty
// string.
struct CrosscheckCase {
  SlaterState<Complex> s1;
  SlaterState<Complex> s2;
  std::vector<OperatorString> strings;
};

CrosscheckCase random_crosscheck_case(Index modes, int kind, Index strings, Engine& eng);
CrosscheckReport random_crosscheck(Index modes, int kind, Index strings, Engine& eng);

// Edge ensemble on a small ring mapped into Fock space. With
// `dipole_orbit`, each member is replaced by its orbit under the dipole
// rotation at n = N + 1 equally spaced angles, which makes rho exactly
// block diagonal in the dipole charge.
struct EdEnsemble {
  FockSpace space{0};
  std::optional<DensityMatrixED> rho;
  std::vector<int> windings;
  Index members = 0;
};

EdEnsemble build_ed_ensemble(const EnsembleSpec& spec, bool dipole_orbit);

}  // namespace mslab

#endif  // MSLAB_ED_ORACLE_HPP
