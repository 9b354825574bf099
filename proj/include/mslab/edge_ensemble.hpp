#ifndef MSLAB_EDGE_ENSEMBLE_HPP
#define MSLAB_EDGE_ENSEMBLE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mslab/gaussian_core.hpp"
#include "mslab/types.hpp"

namespace mslab {

// Sector w is drawn with probabilities[i] for windings[i].
struct WindingRule {
  std::vector<int> windings{0};
  std::vector<double> probabilities{1.0};

  static WindingRule fixed(int w) { return {{w}, {1.0}}; }
  bool is_mixture() const;
};

struct EnsembleSpec {
  Index sites = 96;
  Index samples = 200;
  std::uint64_t seed = 0;
  double mass = 0.5;       // |m|, uniform
  double stiffness = 0.5;  // g: phase-field variance g / k per Fourier mode k
  WindingRule winding;
  double wilson = 1.0;
  double velocity = 1.0;
  std::size_t pair_budget = 10000;  // ordered sample pairs in the Renyi-2 double sum
  Index fit_min = 4;
  Index fit_max = 0;  // 0 means sites / 4

  // Throws PreconditionError naming the offending field.
  void validate() const;
  Index fit_upper() const { return fit_max > 0 ? fit_max : sites / 4; }
};

struct FitRecord {
  enum class Model { Power, Exponential };
  Model model = Model::Power;
  double exponent = 0.0;  // power law a in d^-a
  double length = 0.0;    // decay length xi in exp(-d / xi)
  double r2_power = 0.0;
  double r2_exponential = 0.0;
  double margin = 0.0;  // R^2(selected) - R^2(other)
  Index window_min = 0;
  Index window_max = 0;
  Index bins_used = 0;

  double r2() const { return model == Model::Power ? r2_power : r2_exponential; }
  double exponent_or_length() const { return model == Model::Power ? exponent : length; }
};

std::string to_string(FitRecord::Model m);

// Least squares of log y against log d (power) and against d (exponential)
// over window_min <= d <= window_max, R^2 measured on log y. Needs at least
// six bins in the window (PreconditionError); non-positive values are dropped
// and fewer than four survivors throw FitError.
FitRecord fit_decay(const std::vector<Index>& distances, const std::vector<double>& values, Index window_min,
                    Index window_max);

struct CorrelatorEstimate {
  std::vector<Index> distances;  // 1 .. N/2
  std::vector<Complex> values;
  std::vector<double> stderrs;
  std::optional<FitRecord> fit;  // fitted on |value|
  std::string fit_error;
  Index n_valid = 0;
  Index n_rejected = 0;
};

// Phase field for draw `index`: sum_{k=1}^{N/4} sqrt(g/k) (a_k cos + b_k sin)(2 pi k y / N)
// with standard normal a_k, b_k, plus a uniform global offset and 2 pi w y / N.
// The sector w is drawn first from the winding rule and stored in `winding`.
MassProfile sample_mass_profile(const EnsembleSpec& spec, std::uint64_t index);

struct Ensemble {
  EnsembleSpec spec;
  std::vector<MassProfile> profiles;
  std::vector<SlaterState<Complex>> states;
  std::vector<int> windings;
  Index draws = 0;
  Index rejected_winding = 0;  // lattice winding differs from the drawn sector
  Index rejected_gapless = 0;
  Index rejected_charge = 0;  // ground-state charge differs from N + w

  Index size() const { return static_cast<Index>(states.size()); }
  Index rejected() const { return rejected_winding + rejected_gapless + rejected_charge; }
};

// Draws up to 3K profiles in index order and keeps the first K valid ones.
// Fewer than K/2 valid members throws EnsembleError.
Ensemble draw_ensemble(const EnsembleSpec& spec);

enum class LinearOperator { G, S };

std::string to_string(LinearOperator op);

// Ensemble mean matrix M(y, y') of the two-point function:
//   G: <G^dagger(y') G(y)>, G(y) = c+_{y,R} c_{y,L}, connected part
//      (conj(<G(y')>) <G(y)> of the ensemble mean removed)
//   S: <S(y') S^dagger(y)> = <c+_{y',L} c_{y,L}>
Matrix<Complex> linear_correlator_matrix(const Ensemble& ensemble, LinearOperator op);

CorrelatorEstimate linear_correlator(const Ensemble& ensemble, LinearOperator op);

// tr[rho S(y') S^dagger(y) rho S(y) S^dagger(y')] / tr[rho^2] with uniform
// weights. Diagonal pairs are summed exhaustively; each unordered
// off-diagonal pair enters with probability pi = min(1, budget / #pairs)
// decided by its own seed, and is weighted by 1 / pi. Standard errors are
// leave-one-sample-out jackknife.
CorrelatorEstimate renyi2_correlator(const Ensemble& ensemble);

// Direct double sum for explicit states and weights:
//   sum p p' <m|c+_a c_b|m'><m'|c+_b c_a|m> / sum p p' |<m|m'>|^2
double renyi2_bilinear(const std::vector<SlaterState<Complex>>& states, const std::vector<double>& weights,
                       Index a, Index b);

struct WindingChargeReport {
  std::map<int, Index> charges;  // P(w) for clean profiles
  Index reference = 0;           // P(0)
  bool strong_symmetry_broken = false;
};

WindingChargeReport winding_charge_report(const EnsembleSpec& spec);

// Oriented ring bins: mean over y of M(y, y + d mod N) for d = 1 .. N/2.
// For a Hermitian kernel the opposite orientation is the complex conjugate.
std::vector<Complex> ring_bins(const Matrix<Complex>& m);
// Mean over y of (M(y, y + d) + M(y, y - d)) / 2.
std::vector<Complex> ring_bins_symmetric(const Matrix<Complex>& m);

}  // namespace mslab

#endif  // MSLAB_EDGE_ENSEMBLE_HPP
