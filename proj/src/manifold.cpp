#include "spdsd/manifold.hpp"

#include <cmath>
#include <string>

#include "spdsd/error.hpp"

namespace spdsd {

namespace {

void check_dims(const CholeskyPoint& at, const SymMatrix& m, const char* what) {
  if (at.n() != m.n()) throw DimensionMismatch(std::string(what) + ": dimension mismatch");
}

// B^-1 C_y, whose Gram matrix is B^-1 Y B^-T.
Matrix relative_factor(const CholeskyPoint& x, const CholeskyPoint& y, const Exec& ex) {
  if (x.n() != y.n()) throw DimensionMismatch("relative_factor: dimension mismatch");
  return tri_solve_lower(x.factor(), y.factor().matrix(), SolveSide::left, ex);
}

SymMatrix gram(const Matrix& a, const Exec& ex) { return SymMatrix::symmetrize(multiply_a_bt(a, a, ex)); }

}  // namespace

CholeskyPoint::CholeskyPoint(LowerTriangular b) : b_(std::move(b)) {
  for (std::size_t i = 0; i < b_.n(); ++i) {
    if (!(b_(i, i) > 0.0) || !std::isfinite(b_(i, i)))
      throw NotPositiveDefinite("CholeskyPoint: diagonal entry " + std::to_string(i) + " is not positive");
  }
  if (!all_finite(b_.matrix())) throw NotPositiveDefinite("CholeskyPoint: non-finite entry");
}

CholeskyPoint CholeskyPoint::from_spd(const SymMatrix& x, const Exec& ex) { return CholeskyPoint(cholesky(x, ex)); }

SymMatrix CholeskyPoint::matrix(const Exec& ex) const {
  return SymMatrix::symmetrize(tri_multiply(b_, true, b_.matrix(), kernels::Side::right, ex));
}

double inner(const CholeskyPoint& at, const SymMatrix& xi, const SymMatrix& eta, const Exec& ex) {
  check_dims(at, xi, "inner");
  check_dims(at, eta, "inner");
  const SymMatrix a = inverse_congruence(at.factor(), xi, ex);
  const SymMatrix b = inverse_congruence(at.factor(), eta, ex);
  double s = 0.0;
  const auto da = a.matrix().data();
  const auto db = b.matrix().data();
  for (std::size_t k = 0; k < da.size(); ++k) s += da[k] * db[k];
  ex.charge(da.size());
  return s;
}

CholeskyPoint exp_map(const CholeskyPoint& at, const SymMatrix& xi, double t, const Exec& ex) {
  check_dims(at, xi, "exp_map");
  if (t == 0.0) return at;
  return exp_map_relative(at, inverse_congruence(at.factor(), xi, ex), t, ex);
}

CholeskyPoint exp_map_relative(const CholeskyPoint& at, const SymMatrix& w, double t, const Exec& ex) {
  check_dims(at, w, "exp_map_relative");
  if (t == 0.0 || frobenius_norm(w.matrix()) == 0.0) return at;
  SymMatrix tw = w;
  tw.raw() *= t;
  const EigenDecomposition e = sym_eig(tw, ex);
  for (double v : e.values) {
    if (!std::isfinite(v) || std::abs(v) > kExpEigenCap)
      throw Overflow("exp_map: eigenvalue " + std::to_string(v) + " exceeds the exponent cap");
  }
  const SymMatrix s = apply_matfn(e, MatFn::exp, ex);
  return CholeskyPoint(cholesky(congruence(at.factor(), s, ex), ex));
}

SymMatrix log_map(const CholeskyPoint& at, const CholeskyPoint& y, const Exec& ex) {
  const SymMatrix rel = gram(relative_factor(at, y, ex), ex);
  return congruence(at.factor(), sym_matfn(rel, MatFn::log, ex), ex);
}

SymMatrix riemannian_grad(const CholeskyPoint& at, const SymMatrix& euclid_grad, const Exec& ex) {
  check_dims(at, euclid_grad, "riemannian_grad");
  // X G X = B (B^T G B) B^T
  const Matrix btg = tri_multiply(at.factor(), true, euclid_grad.matrix(), kernels::Side::left, ex);
  const SymMatrix inner_part = SymMatrix::symmetrize(tri_multiply(at.factor(), false, btg, kernels::Side::right, ex));
  return congruence(at.factor(), inner_part, ex);
}

double distance(const CholeskyPoint& x, const CholeskyPoint& y, const Exec& ex) {
  const EigenDecomposition e = sym_eig(gram(relative_factor(x, y, ex), ex), ex);
  double s = 0.0;
  for (double v : e.values) {
    if (!(v > 0.0)) throw DomainError("distance: relative matrix is not positive definite");
    const double l = std::log(v);
    s += l * l;
  }
  return std::sqrt(s);
}

}  // namespace spdsd
