#ifndef MSLAB_TYPES_HPP
#define MSLAB_TYPES_HPP

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace mslab {

using Index = Eigen::Index;
using Complex = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using IntMatrix = Matrix<std::int64_t>;
using IntVector = Vector<std::int64_t>;

// Real part of a real or complex scalar.
template <typename Scalar>
double real_part(const Scalar& s) {
  return std::real(s);
}

}  // namespace mslab

#endif  // MSLAB_TYPES_HPP
