#pragma once

#include <cmath>
#include <utility>

#include "spdsd/matrix.hpp"
#include "spdsd/rng.hpp"

namespace spdsd::testing {

inline Matrix random_matrix(std::size_t n, Rng& rng, double scale = 1.0) {
  Matrix m(n);
  for (double& v : m.data()) v = scale * rng.normal();
  return m;
}

inline SymMatrix random_sym(std::size_t n, Rng& rng, double scale = 1.0) {
  return SymMatrix::symmetrize(random_matrix(n, rng, scale));
}

// A A^T / n + shift I: comfortably SPD.
inline SymMatrix random_spd(std::size_t n, Rng& rng, double shift = 0.5) {
  Matrix a = random_matrix(n, rng);
  Matrix s(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += a(i, k) * a(j, k);
      s(i, j) = acc / static_cast<double>(n) + (i == j ? shift : 0.0);
    }
  return SymMatrix::symmetrize(s);
}

inline LowerTriangular random_factor(std::size_t n, Rng& rng, double offdiag = 0.3) {
  LowerTriangular l(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) l.at(i, j) = offdiag * rng.normal();
    l.at(i, i) = 0.5 + rng.uniform01();
  }
  return l;
}

// Plain triple-loop product used as an independent reference.
inline Matrix naive_product(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.n();
  Matrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      long double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += static_cast<long double>(a(i, k)) * b(k, j);
      c(i, j) = static_cast<double>(s);
    }
  return c;
}

// Gauss-Jordan inverse with partial pivoting; independent of the library's
// triangular solves.
inline Matrix naive_inverse(const Matrix& a) {
  const std::size_t n = a.n();
  Matrix m = a;
  Matrix inv = Matrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m(r, c)) > std::abs(m(piv, c))) piv = r;
    for (std::size_t k = 0; k < n; ++k) {
      std::swap(m(c, k), m(piv, k));
      std::swap(inv(c, k), inv(piv, k));
    }
    const double d = m(c, c);
    for (std::size_t k = 0; k < n; ++k) {
      m(c, k) /= d;
      inv(c, k) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = m(r, c);
      if (f == 0.0) continue;
      for (std::size_t k = 0; k < n; ++k) {
        m(r, k) -= f * m(c, k);
        inv(r, k) -= f * inv(c, k);
      }
    }
  }
  return inv;
}

inline double trace_product(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.n(); ++i)
    for (std::size_t k = 0; k < a.n(); ++k) s += a(i, k) * b(k, i);
  return s;
}

}  // namespace spdsd::testing
