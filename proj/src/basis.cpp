#include "spdsd/basis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "spdsd/error.hpp"

namespace spdsd {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

std::string index_str(const BasisIndex& b) {
  return "(" + std::to_string(b.i) + "," + std::to_string(b.j) + ")";
}

}  // namespace

void check_non_overlapping(std::size_t n, std::span<const BasisIndex> indices) {
  std::vector<char> used(n, 0);
  for (const BasisIndex& b : indices) {
    if (b.i >= n || b.j > b.i) throw DimensionMismatch("direction index " + index_str(b) + " invalid for n=" + std::to_string(n));
    if (used[b.i] || used[b.j]) throw OverlappingDirections("direction " + index_str(b) + " overlaps another");
    used[b.i] = 1;
    used[b.j] = 1;
  }
}

DirectionSet::DirectionSet(std::size_t n, std::vector<Direction> entries) : n_(n), entries_(std::move(entries)) {
  if (entries_.empty()) throw std::invalid_argument("DirectionSet: empty");
  std::vector<BasisIndex> idx(entries_.size());
  std::transform(entries_.begin(), entries_.end(), idx.begin(), [](const Direction& d) { return d.index; });
  check_non_overlapping(n_, idx);
}

DirectionSet::DirectionSet(std::size_t n, std::span<const BasisIndex> indices, std::span<const double> betas)
    : DirectionSet(n, [&] {
        if (indices.size() != betas.size()) throw DimensionMismatch("DirectionSet: beta count mismatch");
        std::vector<Direction> e(indices.size());
        for (std::size_t k = 0; k < e.size(); ++k) e[k] = {indices[k], betas[k]};
        return e;
      }()) {}

UpdateFactor UpdateFactor::from_dense(const LowerTriangular& f) {
  const std::size_t n = f.n();
  std::vector<kernels::Block> blocks;
  std::vector<char> used(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (f(i, j) == 0.0) continue;
      if (used[i] || used[j]) throw StructureViolation("update factor: row/column " + std::to_string(i) + " has several off-diagonal entries");
      used[i] = used[j] = 1;
      blocks.push_back({j, i, f(j, j), 0.0, f(i, j), f(i, i)});
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!(f(k, k) > 0.0)) throw StructureViolation("update factor: non-positive diagonal");
    if (!used[k] && f(k, k) != 1.0) blocks.push_back({k, k, f(k, k), 0.0, 0.0, 1.0});
  }
  return UpdateFactor(n, std::move(blocks));
}

LowerTriangular UpdateFactor::dense() const {
  LowerTriangular f = LowerTriangular::identity(n_);
  for (const kernels::Block& b : blocks_) {
    f.at(b.p, b.p) = b.pp;
    if (b.p != b.q) {
      f.at(b.q, b.p) = b.qp;
      f.at(b.q, b.q) = b.qq;
    }
  }
  return f;
}

double UpdateFactor::log_det() const {
  double s = 0.0;
  for (const kernels::Block& b : blocks_) {
    s += std::log(b.pp);
    if (b.p != b.q) s += std::log(b.qq);
  }
  return s;
}

double beta_from_F(double f_entry, std::size_t i, std::size_t j) { return i == j ? f_entry : kSqrt2 * f_entry; }

UpdateFactor update_factor_uni(std::size_t n, BasisIndex idx, double theta) {
  if (idx.i >= n || idx.j > idx.i) throw DimensionMismatch("update_factor_uni: bad index " + index_str(idx));
  if (!(std::abs(theta) <= kThetaCap)) throw Overflow("update_factor_uni: |theta| = " + std::to_string(theta) + " exceeds cap");
  if (idx.diagonal()) {
    // sqrt(w) with w = exp(-theta)
    return UpdateFactor(n, {{idx.i, idx.i, std::exp(-0.5 * theta), 0.0, 0.0, 1.0}});
  }
  // With s = theta/sqrt(2): u = sqrt(cosh s) = sqrt((w + 1/w)/2) and
  // (w - 1/w)/(2u) = -sinh(s)/u, written without the cancelling difference.
  const double s = theta / kSqrt2;
  const double u = std::sqrt(std::cosh(s));
  return UpdateFactor(n, {{idx.j, idx.i, u, 0.0, -std::sinh(s) / u, 1.0 / u}});
}

UpdateFactor update_factor_multi(const DirectionSet& dirs, double alpha) {
  std::vector<kernels::Block> blocks;
  blocks.reserve(dirs.size());
  for (const Direction& d : dirs.entries()) {
    const UpdateFactor one = update_factor_uni(dirs.n(), d.index, alpha * d.beta);
    blocks.push_back(one.blocks()[0]);
  }
  return UpdateFactor(dirs.n(), std::move(blocks));
}

UpdateFactor invert_update_factor(const UpdateFactor& f) {
  std::vector<kernels::Block> inv(f.blocks().begin(), f.blocks().end());
  for (kernels::Block& b : inv) {
    if (b.p == b.q) {
      b.pp = 1.0 / b.pp;
      continue;
    }
    if (b.pq != 0.0 || std::abs(b.pp * b.qq - 1.0) > 1e-10)
      throw StructureViolation("invert_update_factor: block on (" + std::to_string(b.q) + "," + std::to_string(b.p) +
                               ") is not a unit-determinant lower block");
    b.pp = 1.0 / b.pp;
    b.qq = 1.0 / b.qq;
    b.qp = -b.qp;
  }
  return UpdateFactor(f.n(), std::move(inv));
}

UpdateFactor invert_update_factor(const LowerTriangular& f) { return invert_update_factor(UpdateFactor::from_dense(f)); }

void apply_update(CholeskyPoint& at, const UpdateFactor& f, const Exec& ex) {
  const std::size_t n = at.n();
  if (f.n() != n) throw DimensionMismatch("apply_update: dimension mismatch");
  Matrix& b = at.mutable_factor().raw();
  if (ex.backend == Backend::parallel) {
    kernels::omp::right_multiply(b, f.blocks());
  } else {
    kernels::serial::right_multiply(b, f.blocks());
  }
  std::uint64_t cost = 0;
  for (const kernels::Block& blk : f.blocks()) {
    cost += (blk.p == blk.q ? 1 : 4) * static_cast<std::uint64_t>(n - blk.p);
    for (std::size_t k : {blk.p, blk.q}) {
      const double d = b(k, k);
      if (!std::isfinite(d)) throw Overflow("apply_update: non-finite diagonal at " + std::to_string(k));
      if (!(d > 0.0)) throw NotPositiveDefinite("apply_update: diagonal underflow at " + std::to_string(k));
    }
  }
  ex.charge(cost);
}

BasisIndex unpack_index(std::size_t k) {
  std::size_t i = static_cast<std::size_t>((std::sqrt(8.0 * static_cast<double>(k) + 1.0) - 1.0) / 2.0);
  while (i * (i + 1) / 2 > k) --i;
  while ((i + 1) * (i + 2) / 2 <= k) ++i;
  return {i, k - i * (i + 1) / 2};
}

BasisIndex random_basis_index(std::size_t n, Rng& rng) { return unpack_index(rng.uniform_index(n * (n + 1) / 2)); }

std::vector<BasisIndex> direction_set_from_permutation(std::span<const std::size_t> perm, std::span<const double> draws) {
  const std::size_t n = perm.size();
  const std::size_t cols = n / 2;
  if (draws.size() != cols) throw DimensionMismatch("direction_set_from_permutation: need one draw per column");
  const double p_diag = 1.0 / static_cast<double>(n);
  std::vector<BasisIndex> out;
  out.reserve(n);
  for (std::size_t c = 0; c < cols; ++c) {
    const std::size_t k = perm[2 * c];
    const std::size_t l = perm[2 * c + 1];
    if (draws[c] < p_diag) {
      out.push_back({k, k});
      out.push_back({l, l});
    } else {
      out.push_back({std::max(k, l), std::min(k, l)});
    }
  }
  return out;
}

std::vector<BasisIndex> random_direction_set(std::size_t n, Rng& rng) {
  if (n < 2) throw std::invalid_argument("random_direction_set: needs n >= 2");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t k = n - 1; k > 0; --k) std::swap(perm[k], perm[rng.uniform_index(k + 1)]);
  std::vector<double> draws(n / 2);
  for (double& d : draws) d = rng.uniform01();
  return direction_set_from_permutation(perm, draws);
}

std::vector<BasisIndex> greedy_direction_set(std::size_t n, std::span<const double> packed_lower) {
  const std::size_t d = n * (n + 1) / 2;
  if (packed_lower.size() != d) throw DimensionMismatch("greedy_direction_set: table size mismatch");
  for (double v : packed_lower)
    if (!std::isfinite(v)) throw DomainError("greedy_direction_set: non-finite table entry");
  // Packed order is already (i, j) lexicographic, so ties fall back to position.
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double fa = std::abs(packed_lower[a]);
    const double fb = std::abs(packed_lower[b]);
    if (fa != fb) return fa > fb;
    return a < b;
  });
  std::vector<char> used(n, 0);
  std::size_t free_left = n;
  std::vector<BasisIndex> out;
  for (std::size_t k : order) {
    if (free_left == 0) break;
    const BasisIndex b = unpack_index(k);
    if (used[b.i] || used[b.j]) continue;
    used[b.i] = used[b.j] = 1;
    free_left -= b.diagonal() ? 1 : 2;
    out.push_back(b);
  }
  return out;
}

std::uint64_t greedy_sort_cost(std::size_t n) {
  const std::uint64_t d = n * (n + 1) / 2;
  if (d < 2) return 1;
  const std::uint64_t log2d = std::bit_width(d - 1);  // ceil(log2 d)
  return d * log2d;
}

SymMatrix basis_matrix(std::size_t n, BasisIndex idx) {
  SymMatrix e(n);
  e.set(idx.i, idx.j, idx.diagonal() ? 1.0 : 1.0 / kSqrt2);
  return e;
}

}  // namespace spdsd
