#ifndef MSLAB_INTEGER_LATTICE_HPP
#define MSLAB_INTEGER_LATTICE_HPP

// Exact integer row reduction on int64 matrices. Every arithmetic step is
// overflow-checked; an overflow throws CapacityError rather than wrapping.

#include <cstdint>
#include <cstdlib>
#include <utility>

#include "mslab/errors.hpp"
#include "mslab/types.hpp"

namespace mslab {
namespace lattice {

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw CapacityError("integer overflow in lattice reduction");
  return r;
}

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw CapacityError("integer overflow in lattice reduction");
  return r;
}

// row(dst) -= q * row(src)
inline void axpy_row(IntMatrix& m, Index dst, Index src, std::int64_t q) {
  if (q == 0) return;
  for (Index c = 0; c < m.cols(); ++c) m(dst, c) = checked_add(m(dst, c), checked_mul(-q, m(src, c)));
}

// Floor division for signed integers.
inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Row-style Hermite normal form of the lattice spanned by the rows of `m`.
// Returns only the nonzero rows: pivots strictly increase in column, are
// positive, and the entries above each pivot lie in [0, pivot). Pivoting is
// deterministic (smallest magnitude, then lowest row index), so equal inputs
// give identical outputs on every platform.
inline IntMatrix hermite_normal_form(IntMatrix m) {
  const Index rows = m.rows();
  const Index cols = m.cols();
  Index r = 0;
  for (Index c = 0; c < cols && r < rows; ++c) {
    while (true) {
      Index piv = -1;
      for (Index i = r; i < rows; ++i) {
        if (m(i, c) == 0) continue;
        if (piv < 0 || std::llabs(m(i, c)) < std::llabs(m(piv, c))) piv = i;
      }
      if (piv < 0) break;
      if (piv != r) m.row(piv).swap(m.row(r));
      bool clean = true;
      for (Index i = r + 1; i < rows; ++i) {
        if (m(i, c) == 0) continue;
        axpy_row(m, i, r, m(i, c) / m(r, c));
        if (m(i, c) != 0) clean = false;
      }
      if (clean) break;
    }
    if (r < rows && m(r, c) != 0) {
      if (m(r, c) < 0) m.row(r) = -m.row(r);
      for (Index i = 0; i < r; ++i) axpy_row(m, i, r, floor_div(m(i, c), m(r, c)));
      ++r;
    }
  }
  return m.topRows(r);
}

inline Index rank(const IntMatrix& m) { return hermite_normal_form(m).rows(); }

// Basis (rows, in Hermite normal form) of {v in Z^n : c * v = 0}.
inline IntMatrix integer_kernel(const IntMatrix& c) {
  const Index n = c.cols();
  const Index k = c.rows();
  IntMatrix aug(n, k + n);
  aug.leftCols(k) = c.transpose();
  aug.rightCols(n).setIdentity();
  const IntMatrix h = hermite_normal_form(aug);
  Index count = 0;
  for (Index i = 0; i < h.rows(); ++i)
    if (h.row(i).head(k).isZero()) ++count;
  IntMatrix ker(count, n);
  Index j = 0;
  for (Index i = 0; i < h.rows(); ++i)
    if (h.row(i).head(k).isZero()) ker.row(j++) = h.row(i).tail(n);
  return hermite_normal_form(ker);
}

// Whether `v` lies in the integer row span of `generators`.
inline bool in_span(const IntMatrix& generators, const IntVector& v) {
  const IntMatrix basis = hermite_normal_form(generators);
  IntVector rem = v;
  Index col = 0;
  for (Index i = 0; i < basis.rows(); ++i) {
    while (col < basis.cols() && basis(i, col) == 0) {
      if (rem(col) != 0) return false;
      ++col;
    }
    if (col == basis.cols()) break;
    if (rem(col) % basis(i, col) != 0) return false;
    const std::int64_t q = rem(col) / basis(i, col);
    for (Index c = 0; c < basis.cols(); ++c) rem(c) = checked_add(rem(c), checked_mul(-q, basis(i, c)));
    ++col;
  }
  return rem.isZero();
}

}  // namespace lattice
}  // namespace mslab

#endif  // MSLAB_INTEGER_LATTICE_HPP
