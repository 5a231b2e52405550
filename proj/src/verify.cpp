#include "spdsd/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "spdsd/error.hpp"
#include "spdsd/io.hpp"
#include "spdsd/problem.hpp"

namespace spdsd {

namespace {

SymMatrix gaussian_sym(std::size_t n, Rng& rng, double scale) {
  Matrix m(n);
  for (double& v : m.data()) v = scale * rng.normal();
  return SymMatrix::symmetrize(m);
}

// exp(sigma W), the sampling distribution for points.
CholeskyPoint sample_point(std::size_t n, Rng& rng, double sigma) {
  return CholeskyPoint::from_spd(sym_matfn(gaussian_sym(n, rng, sigma), MatFn::exp));
}

SymMatrix sample_spd(std::size_t n, Rng& rng) {
  Matrix a(n);
  for (double& v : a.data()) v = rng.normal();
  Matrix s = multiply_a_bt(a, a);
  s *= 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) s(k, k) += 0.5;
  return SymMatrix::symmetrize(s);
}

constexpr int kOracleSweeps = 60;
constexpr double kOracleTol = 1e-15;

double rel(double err, double ref) { return std::abs(err) / std::max(1.0, std::abs(ref)); }

// One-sided: only positive violations count.
double violation(double excess, double ref) { return std::max(excess, 0.0) / std::max(1.0, std::abs(ref)); }

double frob_sym(const SymMatrix& a) { return frobenius_norm(a.matrix()); }

Matrix x_inverse(const CholeskyPoint& at) {
  const Matrix binv = tri_solve_lower(at.factor(), Matrix::identity(at.n()), SolveSide::left);
  return multiply_at_b(binv, binv);
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

VerificationReport VerificationReport::make(std::string check, double residual, double tolerance, std::string details) {
  VerificationReport r{std::move(check), residual, tolerance, false, std::move(details)};
  r.pass = residual <= tolerance;
  return r;
}

void write_report_csv(std::ostream& os, const std::vector<VerificationReport>& reports) {
  os << kReportCsvHeader << '\n';
  for (const VerificationReport& r : reports)
    os << r.check << ',' << format_double(r.residual) << ',' << format_double(r.tolerance) << ','
       << (r.pass ? "true" : "false") << '\n';
}

VerificationReport fd_directional_check(const ObjectiveSpec& spec, const CholeskyPoint& at, const SymMatrix& xi,
                                        const std::vector<double>& h_sequence) {
  const double f0 = dense_value(spec, at);
  const double analytic = trace(multiply(euclidean_grad(spec, at).matrix(), xi.matrix()));
  double best = std::numeric_limits<double>::infinity();
  for (double h : h_sequence) {
    const double fd = (dense_value(spec, exp_map(at, xi, h)) - f0) / h;
    best = std::min(best, rel(fd - analytic, analytic));
  }
  return VerificationReport::make("fd_directional", best, 1e-5, "analytic=" + fmt(analytic));
}

double hessian_quadratic_form(const SymMatrix& c, const SymMatrix& d, const CholeskyPoint& at, const SymMatrix& v) {
  const Matrix xinv = x_inverse(at);
  const Matrix vxv = multiply(multiply(v.matrix(), xinv), v.matrix());  // V X^-1 V
  const double quad_d = trace(multiply(d.matrix(), vxv));
  const double quad_c = trace(multiply(multiply(multiply(xinv, vxv), xinv), c.matrix()));
  return quad_d + quad_c;
}

StrongConvexity strong_convexity_certificate(const SymMatrix& c, const SymMatrix& d, std::size_t samples, Rng& rng) {
  const double mu = std::min(sym_eig(c).values.front(), sym_eig(d).values.front());
  if (!(mu > 0.0)) throw NotPositiveDefinite("strong_convexity_certificate: C and D must be positive definite");
  const std::size_t n = c.n();
  StrongConvexity out;
  out.mu = mu;
  out.min_ratio = std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double sigma = s % 2 ? 1.0 : 0.1;
    const CholeskyPoint x = sample_point(n, rng, sigma);
    const SymMatrix v = gaussian_sym(n, rng, sigma);
    const double norm2 = inner(x, v, v);
    if (!(norm2 > 0.0)) continue;
    const double form = hessian_quadratic_form(c, d, x, v);
    out.min_ratio = std::min(out.min_ratio, form / norm2);
    worst = std::max(worst, (mu * norm2 - form) / norm2);
  }
  out.report = VerificationReport::make("strong_convexity_hessian", worst, 1e-9,
                                        "mu=" + fmt(mu) + " min_ratio=" + fmt(out.min_ratio));
  return out;
}

LipschitzBall lipschitz_ball_certificate(double radius) {
  if (!(radius >= 0.0)) throw DomainError("lipschitz_ball_certificate: radius must be non-negative");
  LipschitzBall out;
  out.radius = radius;
  out.L = std::exp(radius) + std::exp(-radius);
  const double lo = std::exp(-radius), hi = std::exp(radius);
  double worst = -std::numeric_limits<double>::infinity();
  constexpr int kGrid = 1000;
  for (int k = 0; k < kGrid; ++k) {
    const double lam = lo + (hi - lo) * k / (kGrid - 1);
    worst = std::max(worst, lam * lam + 1.0 - out.L * lam);
  }
  out.report = VerificationReport::make("lipschitz_ball_R=" + fmt(radius), std::max(worst, 0.0), 1e-12 * out.L * out.L,
                                        "L=" + fmt(out.L));
  return out;
}

ConditionNumbers condition_numbers(const SymMatrix& c) {
  const EigenDecomposition e = sym_eig(c);
  const double lmin = e.values.front(), lmax = e.values.back();
  if (!(lmin > 0.0)) throw NotPositiveDefinite("condition_numbers: C must be positive definite");
  return {std::sqrt((1.0 + 4.0 * lmax) / (1.0 + 4.0 * lmin)), std::sqrt(lmax / lmin)};
}

CholeskyPoint dense_step_oracle(const CholeskyPoint& at, const DirectionSet& dirs, double alpha) {
  const std::size_t n = at.n();
  if (dirs.n() != n) throw DimensionMismatch("dense_step_oracle: dimension mismatch");
  SymMatrix s(n);
  for (const Direction& dir : dirs.entries()) {
    const SymMatrix e = basis_matrix(n, dir.index);
    s.raw() += (-alpha * dir.beta) * e.matrix();
  }
  const Matrix b = at.factor().matrix();
  const SymMatrix xi = SymMatrix::symmetrize(multiply(multiply(b, s.matrix()), b.transposed()));
  // The default Jacobi tolerance leaves eigenvectors accurate to about
  // 1e-12 / gap, which exp then amplifies; the oracle sweeps to roundoff.
  const EigenDecomposition ex = sym_eig(at.matrix(), {}, kOracleSweeps, kOracleTol);
  const SymMatrix half = apply_matfn(ex, MatFn::sqrt);
  const SymMatrix inv_half = apply_matfn(ex, MatFn::inv_sqrt);
  const SymMatrix w = SymMatrix::symmetrize(multiply(multiply(inv_half.matrix(), xi.matrix()), inv_half.matrix()));
  const SymMatrix e = apply_matfn(sym_eig(w, {}, kOracleSweeps, kOracleTol), MatFn::exp);
  return CholeskyPoint::from_spd(SymMatrix::symmetrize(multiply(multiply(half.matrix(), e.matrix()), half.matrix())));
}

VerificationReport strong_convexity_pairs_check(const ObjectiveSpec& spec, double mu, std::size_t samples, Rng& rng) {
  const std::size_t n = spec.n();
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double sigma = s % 2 ? 1.0 : 0.1;
    const CholeskyPoint x = sample_point(n, rng, sigma);
    const CholeskyPoint y = sample_point(n, rng, sigma);
    const SymMatrix xi = log_map(x, y);
    const double fy = dense_value(spec, y);
    const double lower = dense_value(spec, x) + trace(multiply(euclidean_grad(spec, x).matrix(), xi.matrix())) +
                         0.5 * mu * inner(x, xi, xi);
    worst = std::max(worst, violation(lower - fy, fy));
  }
  return VerificationReport::make("strong_convexity_pairs", worst, 1e-9, "mu=" + fmt(mu));
}

VerificationReport gradient_domination_check(const ObjectiveSpec& spec, double mu, double f_star, std::size_t samples,
                                             Rng& rng) {
  const std::size_t n = spec.n();
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const CholeskyPoint x = sample_point(n, rng, s % 2 ? 1.0 : 0.1);
    const double gn = grad_norm_sq(lower_F(init_state(spec, x)), n);
    const double gap = dense_value(spec, x) - f_star;
    worst = std::max(worst, violation(gap - 2.0 / mu * gn, f_star));
  }
  return VerificationReport::make("gradient_domination", worst, 1e-9, "mu=" + fmt(mu));
}

std::vector<VerificationReport> run_verify_suite(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<VerificationReport> out;
  auto named = [&](VerificationReport r, const std::string& name) {
    r.check = name;
    out.push_back(std::move(r));
  };

  // Directional derivatives.
  {
    const std::size_t n = 5;
    const ObjectiveSpec logdet{{}, {}, std::make_shared<QuadLogDet>(1.0)};
    const CholeskyPoint id = CholeskyPoint::identity(n);
    const double deriv = trace(multiply(euclidean_grad(logdet, id).matrix(), Matrix::identity(n)));
    out.push_back(VerificationReport::make("fd_logdet_identity_exact", std::abs(deriv - n), 0.0));
    named(fd_directional_check(logdet, id, SymMatrix::identity(n)), "fd_logdet_identity");
    const ObjectiveSpec f2 = quad_logdet_spec(sample_spd(n, rng), sample_spd(n, rng), 0.0);
    named(fd_directional_check(f2, sample_point(n, rng, 0.5), gaussian_sym(n, rng, 1.0)), "fd_f2_random");
    const ObjectiveSpec comp{{sample_spd(n, rng)}, {sample_spd(n, rng)}, std::make_shared<LogDetComposite>(1, 1, 1, 1)};
    named(fd_directional_check(comp, sample_point(n, rng, 0.5), gaussian_sym(n, rng, 1.0)), "fd_logdetcomposite_random");
  }

  // Hessian form against second differences along the geodesic.
  {
    const std::size_t n = 4;
    const SymMatrix c = sample_spd(n, rng), d = sample_spd(n, rng);
    const ObjectiveSpec spec = quad_logdet_spec(c, d, -1.0);
    double worst = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
      const CholeskyPoint x = sample_point(n, rng, 0.5);
      const SymMatrix v = gaussian_sym(n, rng, 1.0);
      const double h = 1e-4;
      const double fd = (dense_value(spec, exp_map(x, v, h)) - 2.0 * dense_value(spec, x) + dense_value(spec, exp_map(x, v, -h))) / (h * h);
      const double an = hessian_quadratic_form(c, d, x, v);
      worst = std::max(worst, rel(fd - an, an));
    }
    out.push_back(VerificationReport::make("hessian_form_fd", worst, 1e-4));
  }

  // Strong convexity and its consequences.
  {
    const std::size_t n = 5;
    const SymMatrix c = sample_spd(n, rng), d = SymMatrix::identity(n);
    const StrongConvexity sc = strong_convexity_certificate(c, d, 1000, rng);
    out.push_back(sc.report);
    const ObjectiveSpec spec = quad_logdet_spec(c, d, 0.0);
    out.push_back(strong_convexity_pairs_check(spec, sc.mu, 1000, rng));
    const ClosedForm cf = closed_form_optimum(c, d, 0.0);
    out.push_back(gradient_domination_check(spec, sc.mu, cf.f_star, 200, rng));
  }

  for (double r : {0.5, 1.0, 2.0}) out.push_back(lipschitz_ball_certificate(r).report);

  // Condition numbers at the optimum.
  {
    SymMatrix diag(2);
    diag.set(0, 0, 1.0);
    diag.set(1, 1, 100.0);
    const ConditionNumbers cn = condition_numbers(diag);
    out.push_back(VerificationReport::make("kappa2_diag_1_100", std::abs(cn.kappa2 - 10.0), 1e-12));
    out.push_back(VerificationReport::make("kappa1_diag_1_100", std::abs(cn.kappa1 - std::sqrt(401.0 / 5.0)), 1e-12));
    Matrix pc(3);
    const double vals[3][3] = {{5.6667, 10, 5.8889}, {10, 26.2222, 17.5556}, {5.8889, 17.5556, 12.1111}};
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) pc(i, j) = vals[i][j];
    const ConditionNumbers published = condition_numbers(SymMatrix(pc));
    out.push_back(VerificationReport::make("kappa1_published_C", std::abs(published.kappa1 - 12.87), 0.05,
                                           "kappa1=" + fmt(published.kappa1)));
    out.push_back(VerificationReport::make("kappa2_published_C", std::abs(published.kappa2 - 104.88), 0.05,
                                           "kappa2=" + fmt(published.kappa2)));
  }

  // Sparse update path against the eigendecomposition-only oracle.
  {
    double worst = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
      const std::size_t n = 2 + rng.uniform_index(7);
      CholeskyPoint x = sample_point(n, rng, 0.3);
      const bool multi = rep % 2 == 1;
      const std::vector<BasisIndex> idx =
          multi ? random_direction_set(n, rng) : std::vector<BasisIndex>{random_basis_index(n, rng)};
      std::vector<double> betas(idx.size());
      for (double& b : betas) b = 2.0 * rng.uniform01() - 1.0;
      const DirectionSet dirs(n, idx, betas);
      const double alpha = 5.0 * rng.uniform01();
      const CholeskyPoint ref = dense_step_oracle(x, dirs, alpha);
      apply_update(x, update_factor_multi(dirs, alpha));
      worst = std::max(worst, frobenius_norm(x.matrix().matrix() - ref.matrix().matrix()));
    }
    out.push_back(VerificationReport::make("sparse_dense_equivalence", worst, 1e-10));
  }

  // Maintained state against a from-scratch recomputation.
  {
    const std::size_t n = 20;
    const ObjectiveSpec spec{{sample_spd(n, rng)}, {sample_spd(n, rng)}, std::make_shared<LogDetComposite>(1.5, 0.7, 2, 0.4)};
    CholeskyPoint x = sample_point(n, rng, 0.3);
    ObjectiveState st = init_state(spec, x);
    for (int t = 0; t < 1000; ++t) {
      const UpdateFactor f = update_factor_uni(n, random_basis_index(n, rng), 0.05 * rng.normal());
      apply_update(x, f);
      advance_state(spec, st, f, x);
    }
    const ObjectiveState fresh = init_state(spec, x);
    double worst = rel(st.logdet - fresh.logdet, fresh.logdet);
    worst = std::max(worst, max_abs_diff(st.m1[0].matrix(), fresh.m1[0].matrix()) / std::max(1.0, frob_sym(fresh.m1[0])));
    worst = std::max(worst, max_abs_diff(st.m2[0].matrix(), fresh.m2[0].matrix()) / std::max(1.0, frob_sym(fresh.m2[0])));
    out.push_back(VerificationReport::make("state_drift_1000_steps", worst, 1e-7));
  }

  // Greedy selection keeps at least 1/(2n) of the squared gradient norm.
  {
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
      const std::size_t n = std::vector<std::size_t>{5, 20, 50}[rep % 3];
      const ObjectiveSpec spec = quad_logdet_spec(sample_spd(n, rng), SymMatrix::identity(n), 0.0);
      const ObjectiveState st = init_state(spec, sample_point(n, rng, 0.3));
      const std::vector<double> table = lower_F(st);
      double selected = 0.0;
      for (const BasisIndex& b : greedy_direction_set(n, table)) {
        const double beta = beta_from_F(table[packed_index(b.i, b.j)], b.i, b.j);
        selected += beta * beta;
      }
      const double bound = grad_norm_sq(table, n) / (2.0 * static_cast<double>(n));
      worst = std::max(worst, (bound - selected) / std::max(bound, 1e-300));
    }
    out.push_back(VerificationReport::make("greedy_selection_bound", std::max(worst, 0.0), 1e-12));
  }
  return out;
}

}  // namespace spdsd
