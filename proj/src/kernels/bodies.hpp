#pragma once

// Per-row / per-block kernel bodies shared by the serial and OpenMP drivers.
// A driver only decides how the outer loop is scheduled; the arithmetic of
// each output entry lives here, which keeps both drivers bitwise identical.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "spdsd/kernels.hpp"
#include "spdsd/matrix.hpp"

namespace spdsd::kernels::detail {

// Pivot of column j of the Cholesky factor, given columns < j.
inline double cholesky_pivot(const Matrix& a, const Matrix& l, std::size_t j) {
  auto lj = l.row(j);
  double s = a(j, j);
  for (std::size_t k = 0; k < j; ++k) s -= lj[k] * lj[k];
  return s;
}

// Entry (i, j), i > j, of the Cholesky factor given columns < j and l(j,j).
inline void cholesky_entry(const Matrix& a, Matrix& l, std::size_t i, std::size_t j) {
  auto li = l.row(i);
  auto lj = l.row(j);
  double s = a(i, j);
  for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
  li[j] = s / lj[j];
}

inline void gemm_row(const Matrix& a, bool ta, const Matrix& b, bool tb, Matrix& c, std::size_t i) {
  const std::size_t n = a.n();
  auto ci = c.row(i);
  if (!tb) {
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = ta ? a(k, i) : a(i, k);
      if (aik == 0.0) continue;
      auto bk = b.row(k);
      for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
    }
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      auto bj = b.row(j);
      double s = 0.0;
      if (ta) {
        for (std::size_t k = 0; k < n; ++k) s += a(k, i) * bj[k];
      } else {
        auto ai = a.row(i);
        for (std::size_t k = 0; k < n; ++k) s += ai[k] * bj[k];
      }
      ci[j] = s;
    }
  }
}

inline void trmm_row(const Matrix& l, bool tl, const Matrix& m, Side side, Matrix& c, std::size_t i) {
  const std::size_t n = l.n();
  auto ci = c.row(i);
  if (side == Side::left) {
    if (!tl) {
      // (L M)_ij = sum_{k<=i} L_ik M_kj
      for (std::size_t k = 0; k <= i; ++k) {
        const double lik = l(i, k);
        if (lik == 0.0) continue;
        auto mk = m.row(k);
        for (std::size_t j = 0; j < n; ++j) ci[j] += lik * mk[j];
      }
    } else {
      // (L^T M)_ij = sum_{k>=i} L_ki M_kj
      for (std::size_t k = i; k < n; ++k) {
        const double lki = l(k, i);
        if (lki == 0.0) continue;
        auto mk = m.row(k);
        for (std::size_t j = 0; j < n; ++j) ci[j] += lki * mk[j];
      }
    }
  } else {
    auto mi = m.row(i);
    if (!tl) {
      // (M L)_ij = sum_{k>=j} M_ik L_kj
      for (std::size_t k = 0; k < n; ++k) {
        const double mik = mi[k];
        if (mik == 0.0) continue;
        auto lk = l.row(k);
        for (std::size_t j = 0; j <= k; ++j) ci[j] += mik * lk[j];
      }
    } else {
      // (M L^T)_ij = sum_{k<=j} M_ik L_jk
      for (std::size_t j = 0; j < n; ++j) {
        auto lj = l.row(j);
        double s = 0.0;
        for (std::size_t k = 0; k <= j; ++k) s += mi[k] * lj[k];
        ci[j] = s;
      }
    }
  }
}

// Forward substitution for columns [c0, c1) of l * x = rhs.
inline void trsm_left_columns(const Matrix& l, const Matrix& rhs, Matrix& x, std::size_t c0,
                              std::size_t c1) {
  const std::size_t n = l.n();
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    auto ri = rhs.row(i);
    for (std::size_t c = c0; c < c1; ++c) xi[c] = ri[c];
    for (std::size_t k = 0; k < i; ++k) {
      const double lik = l(i, k);
      if (lik == 0.0) continue;
      auto xk = x.row(k);
      for (std::size_t c = c0; c < c1; ++c) xi[c] -= lik * xk[c];
    }
    const double d = l(i, i);
    for (std::size_t c = c0; c < c1; ++c) xi[c] /= d;
  }
}

// Row r of x * l^T = rhs.
inline void trsm_right_transposed_row(const Matrix& l, const Matrix& rhs, Matrix& x, std::size_t r) {
  const std::size_t n = l.n();
  auto xr = x.row(r);
  auto rr = rhs.row(r);
  for (std::size_t i = 0; i < n; ++i) {
    auto li = l.row(i);
    double s = rr[i];
    for (std::size_t k = 0; k < i; ++k) s -= xr[k] * li[k];
    xr[i] = s / li[i];
  }
}

// Lower half of row i of u * diag(d) * u^T, mirrored into the upper half.
inline void scaled_outer_row(const Matrix& u, std::span<const double> d, Matrix& c, std::size_t i,
                             std::vector<double>& scratch) {
  const std::size_t n = u.n();
  auto ui = u.row(i);
  scratch.resize(n);
  for (std::size_t k = 0; k < n; ++k) scratch[k] = ui[k] * d[k];
  for (std::size_t j = 0; j <= i; ++j) {
    auto uj = u.row(j);
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += scratch[k] * uj[k];
    c(i, j) = s;
    c(j, i) = s;
  }
}

// Row r of m * T for block-sparse T. With `lower_only`, blocks whose
// columns are zero in row r of a lower-triangular m are skipped.
inline void block_column_mix(std::span<double> row, std::span<const Block> blocks, std::size_t r,
                             bool lower_only) {
  for (const Block& b : blocks) {
    if (lower_only && r < b.p) continue;
    if (b.p == b.q) {
      row[b.p] *= b.pp;
    } else {
      const double xp = row[b.p];
      const double xq = row[b.q];
      row[b.p] = xp * b.pp + xq * b.qp;
      row[b.q] = xp * b.pq + xq * b.qq;
    }
  }
}

// Rows p and q of T^T y for one block.
inline void block_row_mix(Matrix& m, const Block& b) {
  auto rp = m.row(b.p);
  if (b.p == b.q) {
    for (double& v : rp) v *= b.pp;
    return;
  }
  auto rq = m.row(b.q);
  for (std::size_t c = 0; c < rp.size(); ++c) {
    const double yp = rp[c];
    const double yq = rq[c];
    rp[c] = b.pp * yp + b.qp * yq;
    rq[c] = b.pq * yp + b.qq * yq;
  }
}

// Copies the freshly computed rows of one block into the matching columns.
// Writes land only in untouched rows or above the diagonal of touched pairs,
// so blocks can be processed concurrently.
inline void block_mirror(Matrix& m, const Block& b, const std::vector<char>& touched) {
  const std::size_t n = m.n();
  const std::size_t rows[2] = {b.p, b.q};
  const std::size_t count = b.p == b.q ? 1 : 2;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t t = rows[k];
    for (std::size_t c = 0; c < n; ++c) {
      if (!touched[c] || c < t) m(c, t) = m(t, c);
    }
  }
}

inline void combine_row(std::span<const Matrix* const> mats, std::span<const double> w, double shift,
                        Matrix& f, std::size_t i) {
  for (std::size_t j = 0; j <= i; ++j) {
    double s = i == j ? shift : 0.0;
    for (std::size_t k = 0; k < mats.size(); ++k) s += w[k] * (*mats[k])(i, j);
    f(i, j) = s;
    f(j, i) = s;
  }
}

struct Rotation {
  std::size_t p = 0;
  std::size_t q = 0;
  double c = 1.0;
  double s = 0.0;
  bool active = false;
};

// Rotation annihilating a(p,q); inactive when the entry is below `skip`.
inline Rotation jacobi_rotation(const Matrix& a, std::size_t p, std::size_t q, double skip) {
  Rotation r{p, q, 1.0, 0.0, false};
  const double apq = a(p, q);
  if (std::abs(apq) <= skip) return r;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  r.c = 1.0 / std::sqrt(t * t + 1.0);
  r.s = t * r.c;
  r.active = true;
  return r;
}

inline void rotate_columns(std::span<double> row, const Rotation& r) {
  const double xp = row[r.p];
  const double xq = row[r.q];
  row[r.p] = r.c * xp - r.s * xq;
  row[r.q] = r.s * xp + r.c * xq;
}

inline void rotate_rows(Matrix& a, const Rotation& r) {
  auto rp = a.row(r.p);
  auto rq = a.row(r.q);
  for (std::size_t k = 0; k < rp.size(); ++k) {
    const double xp = rp[k];
    const double xq = rq[k];
    rp[k] = r.c * xp - r.s * xq;
    rq[k] = r.s * xp + r.c * xq;
  }
}

inline double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.n(); ++i)
    for (std::size_t j = 0; j < a.n(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

inline std::vector<char> touched_mask(std::size_t n, std::span<const Block> blocks) {
  std::vector<char> mask(n, 0);
  for (const Block& b : blocks) {
    mask[b.p] = 1;
    mask[b.q] = 1;
  }
  return mask;
}

}  // namespace spdsd::kernels::detail
