#include "mslab/gaussian_core.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

namespace mslab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double principal(double d) { return std::remainder(d, kTwoPi); }

}  // namespace

MassProfile MassProfile::uniform(Index sites, double magnitude, int winding, double offset) {
  MassProfile p;
  p.winding = winding;
  p.magnitude.assign(static_cast<std::size_t>(sites), magnitude);
  p.phase.resize(static_cast<std::size_t>(sites));
  for (Index y = 0; y < sites; ++y)
    p.phase[static_cast<std::size_t>(y)] = offset + kTwoPi * winding * static_cast<double>(y) / static_cast<double>(sites);
  return p;
}

int lattice_winding(const std::vector<double>& phase) {
  const std::size_t n = phase.size();
  double acc = 0.0;
  for (std::size_t y = 0; y < n; ++y) acc += principal(phase[(y + 1) % n] - phase[y]);
  return static_cast<int>(std::lround(acc / kTwoPi));
}

double hermiticity_residual(const Matrix<Complex>& h) {
  if (h.size() == 0) return 0.0;
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

SingleParticleHamiltonian<Complex> build_edge_hamiltonian(const EdgeModel& model, const MassProfile& profile) {
  const Index n = model.sites;
  if (n < 2) throw PreconditionError("edge ring needs at least 2 sites");
  if (profile.sites() != n || static_cast<Index>(profile.phase.size()) != n)
    throw PreconditionError("mass profile length does not match the ring");
  if (!std::isfinite(model.velocity) || !std::isfinite(model.wilson) || !std::isfinite(model.twist))
    throw PreconditionError("non-finite model parameter");
  for (Index y = 0; y < n; ++y) {
    const double m = profile.magnitude[static_cast<std::size_t>(y)];
    if (!(m >= 0.0) || !std::isfinite(m) || !std::isfinite(profile.phase[static_cast<std::size_t>(y)]))
      throw PreconditionError("mass profile must be finite with nonnegative magnitude");
  }

  const Complex iu(0.0, 1.0);
  const double v = model.velocity;
  const double b = model.wilson;
  Matrix<Complex> h = Matrix<Complex>::Zero(2 * n, 2 * n);
  const Index R = static_cast<Index>(Component::Right);
  const Index L = static_cast<Index>(Component::Left);
  for (Index y = 0; y < n; ++y) {
    const Complex m = profile.mass(y);
    h(2 * y + R, 2 * y + L) += std::conj(m) + b;
    h(2 * y + L, 2 * y + R) += m + b;

    const Index z = (y + 1) % n;
    const Complex twist = (y == n - 1) ? std::polar(1.0, model.twist) : Complex(1.0);
    // block T = (i v / 2) tau^z - (b / 2) tau^x on c+_y ... c_z
    Eigen::Matrix2cd t;
    t << iu * v / 2.0, -b / 2.0, -b / 2.0, -iu * v / 2.0;
    t *= twist;
    h.block(2 * y, 2 * z, 2, 2) += t;
    h.block(2 * z, 2 * y, 2, 2) += t.adjoint();
  }
  const double res = hermiticity_residual(h);
  if (!(res < 1e-12)) throw std::logic_error("edge Hamiltonian assembly is not Hermitian");
  return {std::move(h), n, v, b, model.twist};
}

std::string to_string(TransitionPath p) {
  switch (p) {
    case TransitionPath::Inverse: return "inverse";
    case TransitionPath::Adjugate: return "adjugate";
    case TransitionPath::Vanishing: return "vanishing";
  }
  return "unknown";
}

std::vector<SpectralFlowRow> spectral_flow_charge(const EdgeModel& model, double magnitude,
                                                  const std::vector<int>& windings) {
  auto particles = [&](int w, double& gap) {
    const auto h = build_edge_hamiltonian(model, MassProfile::uniform(model.sites, magnitude, w));
    const Vector<double> e = spectrum(h);
    gap = e.cwiseAbs().minCoeff();
    if (gap < 1e-9) throw DegeneracyError("zero mode at winding " + std::to_string(w), gap, w);
    return static_cast<Index>((e.array() < 0.0).count());
  };
  double gap0 = 0.0;
  const Index p0 = particles(0, gap0);
  std::vector<SpectralFlowRow> rows;
  for (int w : windings) {
    SpectralFlowRow r;
    r.winding = w;
    r.particles = w == 0 ? p0 : particles(w, r.gap);
    if (w == 0) r.gap = gap0;
    r.delta_charge = r.particles - p0;
    rows.push_back(r);
  }
  return rows;
}

void write_matrix_csv(std::ostream& os, const Matrix<Complex>& m) {
  os << "# " << m.rows() << " " << m.cols() << "\n";
  os.precision(17);
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != Complex(0.0))
        os << i << "," << j << "," << m(i, j).real() << "," << m(i, j).imag() << "\n";
}

}  // namespace mslab
