#include "spdsd/problem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spdsd/error.hpp"
#include "spdsd/rng.hpp"

namespace spdsd {

namespace {

EigenDecomposition positive_spectrum(const SymMatrix& m, const char* what, const Exec& ex) {
  EigenDecomposition e = sym_eig(m, ex);
  if (!(e.values.front() > 0.0))
    throw NotPositiveDefinite(std::string(what) + " is not positive definite (lambda_min = " +
                              std::to_string(e.values.front()) + ")");
  return e;
}

}  // namespace

bool is_identity(const SymMatrix& m) {
  for (std::size_t i = 0; i < m.n(); ++i)
    for (std::size_t j = 0; j < m.n(); ++j)
      if (m(i, j) != (i == j ? 1.0 : 0.0)) return false;
  return true;
}

bool is_zero(const SymMatrix& m) {
  for (double v : m.matrix().data())
    if (v != 0.0) return false;
  return true;
}

ProblemInstance gen_problem(std::size_t n, std::uint64_t seed, double k) {
  if (n < 2) throw ConfigError("gen_problem: n must be at least 2");
  Rng rng(seed);
  Matrix t(n);
  for (double& v : t.data()) v = static_cast<double>(rng.uniform_int(1, 10));
  // Exact integer arithmetic up to n * 100 < 2^53, then one rounding per entry.
  Matrix c(n);
  const double scale = static_cast<double>(n) * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < n; ++l) s += t(i, l) * t(j, l);
      c(i, j) = c(j, i) = s / scale;
    }
  ProblemInstance inst;
  inst.n = n;
  inst.c = SymMatrix(c);
  inst.d = SymMatrix::identity(n);
  inst.k = k;
  inst.seed = seed;
  return inst;
}

ClosedForm closed_form_optimum(const SymMatrix& c, const SymMatrix& d, double k, const Exec& ex) {
  if (c.n() != d.n()) throw DimensionMismatch("closed_form_optimum: C and D differ in size");
  SymMatrix x;
  if (is_identity(d) && k == 0.0) {
    x = apply_matfn(positive_spectrum(c, "C", ex), MatFn::sqrt, ex);
  } else if (is_zero(c) && k == -1.0) {
    x = apply_matfn(positive_spectrum(d, "D", ex), MatFn::inv, ex);
  } else if (is_identity(d) && k == -1.0) {
    // C only needs to be PSD here; the root stays >= 1.
    EigenDecomposition e = sym_eig(c, ex);
    const double floor = -1e-12 * std::max(1.0, std::abs(e.values.back()));
    if (e.values.front() < floor) throw NotPositiveDefinite("C is not positive semidefinite");
    for (double& l : e.values) l = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * std::max(l, 0.0)));
    x = apply_matfn(e, MatFn::power, ex, 1.0);
  } else {
    throw NoClosedForm("no closed form for this (C, D, k); recognized: D=I with k=0 or k=-1, C=0 with k=-1");
  }
  ClosedForm out{CholeskyPoint::from_spd(x, ex), 0.0};
  out.f_star = dense_value(quad_logdet_spec(c, d, k), out.x_star, ex);
  return out;
}

void attach_optimum(ProblemInstance& inst, const Exec& ex) {
  try {
    inst.optimum = closed_form_optimum(inst.c, inst.d, inst.k, ex);
  } catch (const NoClosedForm&) {
    inst.optimum.reset();
  }
}

}  // namespace spdsd
