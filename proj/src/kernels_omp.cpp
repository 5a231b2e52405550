#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "kernels/bodies.hpp"
#include "spdsd/error.hpp"
#include "spdsd/kernels.hpp"

namespace spdsd::kernels::omp {

namespace {
// Below this size thread start-up costs more than it saves.
constexpr std::size_t kParallelMin = 48;
constexpr std::size_t kColumnChunk = 32;
}  // namespace

Matrix cholesky(const Matrix& a) {
  const std::size_t n = a.n();
  Matrix l(n);
  const bool par = n >= kParallelMin;
  for (std::size_t j = 0; j < n; ++j) {
    const double piv = detail::cholesky_pivot(a, l, j);
    if (!(piv > 0.0)) throw NotPositiveDefinite("cholesky: non-positive pivot at " + std::to_string(j));
    l(j, j) = std::sqrt(piv);
#pragma omp parallel for schedule(static) if (par && n - j > kParallelMin)
    for (std::size_t i = j + 1; i < n; ++i) detail::cholesky_entry(a, l, i, j);
  }
  return l;
}

Matrix gemm(const Matrix& a, bool trans_a, const Matrix& b, bool trans_b) {
  if (a.n() != b.n()) throw DimensionMismatch("gemm: dimension mismatch");
  const std::size_t n = a.n();
  Matrix c(n);
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
  for (std::size_t i = 0; i < n; ++i) detail::gemm_row(a, trans_a, b, trans_b, c, i);
  return c;
}

Matrix trmm(const Matrix& l, bool trans_l, const Matrix& m, Side side) {
  if (l.n() != m.n()) throw DimensionMismatch("trmm: dimension mismatch");
  const std::size_t n = l.n();
  Matrix c(n);
#pragma omp parallel for schedule(dynamic, 8) if (n >= kParallelMin)
  for (std::size_t i = 0; i < n; ++i) detail::trmm_row(l, trans_l, m, side, c, i);
  return c;
}

Matrix trsm_left(const Matrix& l, const Matrix& rhs) {
  if (l.n() != rhs.n()) throw DimensionMismatch("trsm: dimension mismatch");
  const std::size_t n = l.n();
  Matrix x(n);
  const std::size_t chunks = (n + kColumnChunk - 1) / kColumnChunk;
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
  for (std::size_t ch = 0; ch < chunks; ++ch) {
    const std::size_t c0 = ch * kColumnChunk;
    detail::trsm_left_columns(l, rhs, x, c0, std::min(n, c0 + kColumnChunk));
  }
  return x;
}

Matrix trsm_right_transposed(const Matrix& l, const Matrix& rhs) {
  if (l.n() != rhs.n()) throw DimensionMismatch("trsm: dimension mismatch");
  const std::size_t n = l.n();
  Matrix x(n);
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
  for (std::size_t r = 0; r < n; ++r) detail::trsm_right_transposed_row(l, rhs, x, r);
  return x;
}

// Round-robin (tournament) Jacobi: each round rotates n/2 disjoint pairs at
// once, and n-1 rounds (n rounded up to even) visit every pair per sweep.
JacobiStats jacobi(Matrix& a, Matrix& u, int max_sweeps, double tol) {
  const std::size_t n = a.n();
  JacobiStats st;
  const double fro = frobenius_norm(a);
  const double skip = n > 0 ? 1e-3 * tol * fro / static_cast<double>(n) : 0.0;
  const std::size_t m = n + (n % 2);
  std::vector<std::size_t> slot(m);
  std::iota(slot.begin(), slot.end(), 0);
  std::vector<detail::Rotation> rots(m / 2);
  const bool par = n >= kParallelMin;

  for (;;) {
    if (detail::off_diagonal_norm(a) <= tol * fro) {
      st.converged = true;
      return st;
    }
    if (st.sweeps == max_sweeps) return st;
    ++st.sweeps;
    for (std::size_t round = 0; round + 1 < m; ++round) {
      std::size_t active = 0;
      for (std::size_t k = 0; k < m / 2; ++k) {
        std::size_t p = slot[k];
        std::size_t q = slot[m - 1 - k];
        if (p > q) std::swap(p, q);
        if (q >= n) {
          rots[k] = detail::Rotation{};
          continue;
        }
        rots[k] = detail::jacobi_rotation(a, p, q, skip);
        if (rots[k].active) ++active;
      }
      if (active > 0) {
        const std::size_t npairs = rots.size();
#pragma omp parallel for schedule(static) if (par)
        for (std::size_t r = 0; r < n; ++r) {
          auto row = a.row(r);
          for (const auto& rot : rots)
            if (rot.active) detail::rotate_columns(row, rot);
        }
#pragma omp parallel for schedule(static) if (par)
        for (std::size_t k = 0; k < npairs; ++k) {
          if (rots[k].active) detail::rotate_rows(a, rots[k]);
        }
        for (const auto& rot : rots) {
          if (!rot.active) continue;
          a(rot.p, rot.q) = 0.0;
          a(rot.q, rot.p) = 0.0;
        }
#pragma omp parallel for schedule(static) if (par)
        for (std::size_t r = 0; r < n; ++r) {
          auto row = u.row(r);
          for (const auto& rot : rots)
            if (rot.active) detail::rotate_columns(row, rot);
        }
        st.rotations += active;
      }
      // Circle method: slot 0 stays put, the rest rotate by one.
      std::rotate(slot.begin() + 1, slot.end() - 1, slot.end());
    }
  }
}

Matrix scaled_outer(const Matrix& u, std::span<const double> d) {
  if (d.size() != u.n()) throw DimensionMismatch("scaled_outer: dimension mismatch");
  const std::size_t n = u.n();
  Matrix c(n);
#pragma omp parallel if (n >= kParallelMin)
  {
    std::vector<double> scratch;
#pragma omp for schedule(dynamic, 8)
    for (std::size_t i = 0; i < n; ++i) detail::scaled_outer_row(u, d, c, i, scratch);
  }
  return c;
}

void congruence(Matrix& m, std::span<const Block> blocks) {
  const std::size_t n = m.n();
  const std::size_t nb = blocks.size();
  const bool par = n >= kParallelMin;
#pragma omp parallel for schedule(static) if (par)
  for (std::size_t r = 0; r < n; ++r) detail::block_column_mix(m.row(r), blocks, r, false);
#pragma omp parallel for schedule(static) if (par)
  for (std::size_t k = 0; k < nb; ++k) detail::block_row_mix(m, blocks[k]);
  const auto touched = detail::touched_mask(n, blocks);
#pragma omp parallel for schedule(static) if (par)
  for (std::size_t k = 0; k < nb; ++k) detail::block_mirror(m, blocks[k], touched);
}

void right_multiply(Matrix& b, std::span<const Block> blocks) {
  const std::size_t n = b.n();
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
  for (std::size_t r = 0; r < n; ++r) detail::block_column_mix(b.row(r), blocks, r, true);
}

Matrix combine(std::span<const Matrix* const> mats, std::span<const double> weights, double shift) {
  if (mats.empty()) throw DimensionMismatch("combine: no matrices");
  if (mats.size() != weights.size()) throw DimensionMismatch("combine: weight count mismatch");
  const std::size_t n = mats[0]->n();
  Matrix f(n);
#pragma omp parallel for schedule(dynamic, 8) if (n >= kParallelMin)
  for (std::size_t i = 0; i < n; ++i) detail::combine_row(mats, weights, shift, f, i);
  return f;
}

}  // namespace spdsd::kernels::omp
