#include <cmath>
#include <string>

#include "kernels/bodies.hpp"
#include "spdsd/error.hpp"
#include "spdsd/kernels.hpp"

namespace spdsd {

bool openmp_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

Backend default_backend() { return openmp_enabled() ? Backend::parallel : Backend::serial; }

namespace kernels::serial {

Matrix cholesky(const Matrix& a) {
  const std::size_t n = a.n();
  Matrix l(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double piv = detail::cholesky_pivot(a, l, j);
    if (!(piv > 0.0)) throw NotPositiveDefinite("cholesky: non-positive pivot at " + std::to_string(j));
    l(j, j) = std::sqrt(piv);
    for (std::size_t i = j + 1; i < n; ++i) detail::cholesky_entry(a, l, i, j);
  }
  return l;
}

Matrix gemm(const Matrix& a, bool trans_a, const Matrix& b, bool trans_b) {
  if (a.n() != b.n()) throw DimensionMismatch("gemm: dimension mismatch");
  Matrix c(a.n());
  for (std::size_t i = 0; i < a.n(); ++i) detail::gemm_row(a, trans_a, b, trans_b, c, i);
  return c;
}

Matrix trmm(const Matrix& l, bool trans_l, const Matrix& m, Side side) {
  if (l.n() != m.n()) throw DimensionMismatch("trmm: dimension mismatch");
  Matrix c(l.n());
  for (std::size_t i = 0; i < l.n(); ++i) detail::trmm_row(l, trans_l, m, side, c, i);
  return c;
}

Matrix trsm_left(const Matrix& l, const Matrix& rhs) {
  if (l.n() != rhs.n()) throw DimensionMismatch("trsm: dimension mismatch");
  Matrix x(l.n());
  detail::trsm_left_columns(l, rhs, x, 0, l.n());
  return x;
}

Matrix trsm_right_transposed(const Matrix& l, const Matrix& rhs) {
  if (l.n() != rhs.n()) throw DimensionMismatch("trsm: dimension mismatch");
  Matrix x(l.n());
  for (std::size_t r = 0; r < l.n(); ++r) detail::trsm_right_transposed_row(l, rhs, x, r);
  return x;
}

// Cyclic-by-row Jacobi.
JacobiStats jacobi(Matrix& a, Matrix& u, int max_sweeps, double tol) {
  const std::size_t n = a.n();
  JacobiStats st;
  const double fro = frobenius_norm(a);
  const double skip = n > 0 ? 1e-3 * tol * fro / static_cast<double>(n) : 0.0;
  for (;;) {
    if (detail::off_diagonal_norm(a) <= tol * fro) {
      st.converged = true;
      return st;
    }
    if (st.sweeps == max_sweeps) return st;
    ++st.sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const detail::Rotation r = detail::jacobi_rotation(a, p, q, skip);
        if (!r.active) continue;
        for (std::size_t k = 0; k < n; ++k) detail::rotate_columns(a.row(k), r);
        detail::rotate_rows(a, r);
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) detail::rotate_columns(u.row(k), r);
        ++st.rotations;
      }
    }
  }
}

Matrix scaled_outer(const Matrix& u, std::span<const double> d) {
  if (d.size() != u.n()) throw DimensionMismatch("scaled_outer: dimension mismatch");
  Matrix c(u.n());
  std::vector<double> scratch;
  for (std::size_t i = 0; i < u.n(); ++i) detail::scaled_outer_row(u, d, c, i, scratch);
  return c;
}

void congruence(Matrix& m, std::span<const Block> blocks) {
  for (std::size_t r = 0; r < m.n(); ++r) detail::block_column_mix(m.row(r), blocks, r, false);
  for (const Block& b : blocks) detail::block_row_mix(m, b);
  const auto touched = detail::touched_mask(m.n(), blocks);
  for (const Block& b : blocks) detail::block_mirror(m, b, touched);
}

void right_multiply(Matrix& b, std::span<const Block> blocks) {
  for (std::size_t r = 0; r < b.n(); ++r) detail::block_column_mix(b.row(r), blocks, r, true);
}

Matrix combine(std::span<const Matrix* const> mats, std::span<const double> weights, double shift) {
  if (mats.empty()) throw DimensionMismatch("combine: no matrices");
  if (mats.size() != weights.size()) throw DimensionMismatch("combine: weight count mismatch");
  Matrix f(mats[0]->n());
  for (std::size_t i = 0; i < f.n(); ++i) detail::combine_row(mats, weights, shift, f, i);
  return f;
}

}  // namespace kernels::serial
}  // namespace spdsd
