// Acceptance checks: one PASS/FAIL line per criterion, tolerances and
// runtime limits pinned here. Exits 1 if any line fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "spdsd/bench.hpp"
#include "spdsd/problem.hpp"
#include "spdsd/solvers.hpp"
#include "spdsd/verify.hpp"

using namespace spdsd;
using spdsd::testing::random_factor;
using spdsd::testing::random_spd;
using spdsd::testing::random_sym;

namespace {

struct Outcome {
  bool pass = false;
  std::string details;
};

int g_failures = 0;

void criterion(const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++g_failures;
  std::printf("%s %s: %s [%.2fs of %.0fs%s]\n", pass ? "PASS" : "FAIL", name, o.details.c_str(), secs, limit_s,
              in_time ? "" : ", over time limit");
  std::fflush(stdout);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < m; ++k) mx += std::log(x[k]) / m, my += std::log(y[k]) / m;
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < m; ++k) {
    sxy += (std::log(x[k]) - mx) * (std::log(y[k]) - my);
    sxx += (std::log(x[k]) - mx) * (std::log(x[k]) - mx);
  }
  return sxy / sxx;
}

CholeskyPoint near_identity(std::size_t n, Rng& rng, double sigma) {
  return CholeskyPoint::from_spd(sym_matfn(random_sym(n, rng, sigma), MatFn::exp));
}

Outcome condition_numbers_check() {
  Matrix pc(3);
  const double vals[3][3] = {{5.6667, 10, 5.8889}, {10, 26.2222, 17.5556}, {5.8889, 17.5556, 12.1111}};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) pc(i, j) = vals[i][j];
  const ConditionNumbers cn = condition_numbers(SymMatrix(pc));
  const bool ok1 = std::abs(cn.kappa1 - 12.87) <= 0.05;
  const bool ok2 = std::abs(cn.kappa2 - 104.88) <= 0.05;
  return {ok1 && ok2, "kappa1=" + fmt(cn.kappa1) + " (12.87+-0.05 " + (ok1 ? "ok" : "off") + "), kappa2=" +
                          fmt(cn.kappa2) + " (104.88+-0.05 " + (ok2 ? "ok" : "off") + ")"};
}

Outcome sparse_dense_check() {
  Rng rng(101);
  double worst_uni = 0, worst_multi = 0, max_step = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 2 + rng.uniform_index(7);
    CholeskyPoint x(random_factor(n, rng));
    const bool multi = rep % 2 == 1;
    const std::vector<BasisIndex> idx =
        multi ? random_direction_set(n, rng) : std::vector<BasisIndex>{random_basis_index(n, rng)};
    std::vector<double> betas(idx.size());
    for (double& b : betas) b = 2.0 * rng.uniform01() - 1.0;
    const double alpha = 5.0 * rng.uniform01();
    for (double b : betas) max_step = std::max(max_step, alpha * std::abs(b));
    const DirectionSet dirs(n, idx, betas);
    const CholeskyPoint ref = dense_step_oracle(x, dirs, alpha);
    apply_update(x, multi ? update_factor_multi(dirs, alpha) : update_factor_uni(n, idx[0], alpha * betas[0]));
    const double err = frobenius_norm(x.matrix().matrix() - ref.matrix().matrix());
    (multi ? worst_multi : worst_uni) = std::max(multi ? worst_multi : worst_uni, err);
  }
  return {worst_uni <= 1e-10 && worst_multi <= 1e-10 && max_step <= 5.0,
          "1000 cases, max |alpha beta|=" + fmt(max_step) + ", uni err=" + fmt(worst_uni) + ", multi err=" +
              fmt(worst_multi) + " (tol 1e-10)"};
}

Outcome drift_check() {
  Rng rng(102);
  const std::size_t n = 20;
  const ObjectiveSpec spec = quad_logdet_spec(random_spd(n, rng), random_spd(n, rng), -1.0);
  CholeskyPoint x(random_factor(n, rng));
  ObjectiveState st = init_state(spec, x);
  for (int t = 0; t < 1000; ++t) {
    const UpdateFactor f = update_factor_uni(n, random_basis_index(n, rng), 0.05 * rng.normal());
    apply_update(x, f);
    advance_state(spec, st, f, x);
  }
  const ObjectiveState fresh = init_state(spec, x);
  auto rel = [](double err, double ref) { return std::abs(err) / std::max(std::abs(ref), 1e-300); };
  const double e1 = rel(frobenius_norm(st.m1[0].matrix() - fresh.m1[0].matrix()), frobenius_norm(fresh.m1[0].matrix()));
  const double e2 = rel(frobenius_norm(st.m2[0].matrix() - fresh.m2[0].matrix()), frobenius_norm(fresh.m2[0].matrix()));
  const double el = rel(st.logdet - fresh.logdet, fresh.logdet);
  const double ev = rel(value(spec, st) - value(spec, fresh), value(spec, fresh));
  const double worst = std::max({e1, e2, el, ev});
  return {worst <= 1e-7, "n=20, 1000 uni steps: M1 " + fmt(e1) + ", M2 " + fmt(e2) + ", logdet " + fmt(el) +
                             ", value " + fmt(ev) + " (tol 1e-7 relative)"};
}

Outcome convergence_check() {
  const std::size_t n = 100;
  ProblemInstance p = gen_problem(n, 7, 0.0);
  attach_optimum(p);
  const ObjectiveSpec spec = p.spec();
  const CholeskyPoint x0 = CholeskyPoint::identity(n);
  const double d0 = dense_value(spec, x0) - p.optimum->f_star;
  std::string details = "D0=" + fmt(d0);
  bool ok = true;

  for (Algorithm a : {Algorithm::rrsd_multi, Algorithm::rgsd_multi}) {
    SolverConfig c;
    c.algo = a;
    c.alpha = 0.5;
    c.tol = 1e-6 * d0;
    c.max_iters = 3'000'000;
    c.record_every = 10000;
    const RunRecord r = run(spec, c, x0, p.optimum->f_star);
    const bool conv = r.status == RunStatus::converged;
    ok = ok && conv;
    details += "; " + std::string(algorithm_name(a)) + " " + std::string(status_name(r.status)) + " in " +
               std::to_string(r.iterations) + " iters (gap " + fmt(r.rows.back().gap) + ")";
  }

  BenchConfig bc;
  bc.sizes = {n};
  bc.record_every = 1;
  const std::vector<BenchRun> runs = run_bench(bc);
  for (const BenchRun& r : runs)
    if (r.algo == Algorithm::rgd) {
      bool monotone = true;
      for (std::size_t k = 1; k < r.record.rows.size(); ++k)
        monotone = monotone && r.record.rows[k].f_value <= r.record.rows[k - 1].f_value;
      const double final_gap = r.record.rows.back().gap;
      const bool rgd_ok = r.record.status != RunStatus::diverged && monotone && final_gap <= 1e-2 * d0;
      ok = ok && rgd_ok;
      details += "; rgd alpha=0.1 " + std::string(monotone ? "monotone" : "not monotone") + " over " +
                 std::to_string(r.record.iterations) + " iters, gap " + fmt(final_gap) + " (<= 1e-2 D0 " +
                 (rgd_ok ? "ok" : "no") + ")";
    }

  using A = Algorithm;
  const BudgetComparison dirs = compare_at_budget(runs, n, Metric::directions);
  const bool dir_ok = dirs.gap(A::rgsd_multi) <= dirs.gap(A::rrsd_multi) && dirs.gap(A::rrsd_multi) <= dirs.gap(A::rgd) &&
                      dirs.gap(A::rgsd_multi) <= dirs.gap(A::rrsd_uni);
  const BudgetComparison ent = compare_at_budget(runs, n, Metric::F_entries);
  bool ent_ok = true;
  for (const auto& [a, g] : ent.gaps) ent_ok = ent_ok && ent.gap(A::rgsd_multi) >= g;
  const BudgetComparison fl = compare_at_budget(runs, n, Metric::flops);
  const bool fl_ok = fl.gap(A::rrsd_multi) <= fl.gap(A::rrsd_uni) && fl.gap(A::rgsd_multi) <= fl.gap(A::rrsd_uni) &&
                     fl.gap(A::rrsd_uni) <= fl.gap(A::rgd);
  ok = ok && dir_ok && ent_ok && fl_ok;
  for (const auto* cmp : {&dirs, &ent, &fl}) {
    details += "; " + std::string(metric_name(cmp->metric)) + "@" + std::to_string(cmp->budget) + ":";
    for (const auto& [a, g] : cmp->gaps) details += " " + std::string(algorithm_name(a)) + "=" + fmt(g);
    const bool o = cmp == &dirs ? dir_ok : cmp == &ent ? ent_ok : fl_ok;
    details += o ? " (order ok)" : " (order violated)";
  }
  return {ok, details};
}

Outcome rate_bound_check() {
  const std::size_t n = 4, d = n * (n + 1) / 2;
  const ObjectiveSpec spec = quad_logdet_spec(SymMatrix::identity(n), SymMatrix::identity(n), 0.0);
  const double f_star = 2.0 * n;
  Rng rng(103);
  const CholeskyPoint x0 = near_identity(n, rng, 0.3);
  const double d0 = dense_value(spec, x0) - f_star;
  const double mu = strong_convexity_certificate(SymMatrix::identity(n), SymMatrix::identity(n), 200, rng).mu;
  const double radius = std::sqrt(2.0 * d0 / mu);
  const LipschitzBall ball = lipschitz_ball_certificate(radius);
  const int seeds = 20, steps = 1000;
  std::vector<double> mean(steps + 1, 0.0);
  for (int s = 0; s < seeds; ++s) {
    SolverConfig c;
    c.algo = Algorithm::rrsd_uni;
    c.alpha = 1.0 / ball.L;
    c.max_iters = steps;
    c.seed = 1000 + s;
    const RunRecord r = run(spec, c, x0, f_star);
    if (r.rows.size() != mean.size()) return {false, "seed " + std::to_string(s) + " stopped early: " + r.message};
    for (int t = 0; t <= steps; ++t) mean[t] += r.rows[t].gap / seeds;
  }
  const double rho = 1.0 - mu / (4.0 * d * ball.L);
  double worst = 0.0;
  for (int t = 0; t <= steps; ++t) worst = std::max(worst, mean[t] / (1.5 * std::pow(rho, t) * d0));
  return {ball.report.pass && worst <= 1.0, "n=4, D0=" + fmt(d0) + ", mu=" + fmt(mu) + ", R=" + fmt(radius) + ", L=" +
                                                fmt(ball.L) + ", max mean-gap / bound=" + fmt(worst) + " (<= 1)"};
}

Outcome greedy_bound_check() {
  Rng rng(104);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = std::vector<std::size_t>{5, 20, 50}[rep % 3];
    const ObjectiveSpec spec = quad_logdet_spec(random_spd(n, rng), random_spd(n, rng), rep % 2 ? -1.0 : 0.0);
    const ObjectiveState st = init_state(spec, CholeskyPoint(random_factor(n, rng)));
    const std::vector<double> table = lower_F(st);
    double selected = 0.0;
    for (const BasisIndex& b : greedy_direction_set(n, table)) {
      const double beta = beta_from_F(table[packed_index(b.i, b.j)], b.i, b.j);
      selected += beta * beta;
    }
    worst = std::max(worst, grad_norm_sq(table, n) / (2.0 * n) / selected);
  }
  return {worst <= 1.0, "100 instances, max bound/selected=" + fmt(worst) + " (<= 1)"};
}

Outcome sampling_check() {
  std::string details;
  bool ok = true;
  for (std::size_t n : {6, 7}) {
    Rng rng(105 + n);
    std::vector<double> beta(n * (n + 1) / 2);
    for (double& b : beta) b = rng.normal();
    double total = 0.0;
    for (double b : beta) total += b * b;
    const double c = n % 2 == 0 ? static_cast<double>(n) : static_cast<double>(n * n) / (n - 1);
    const int draws = 100000;
    double acc = 0.0;
    for (int k = 0; k < draws; ++k)
      for (const BasisIndex& b : random_direction_set(n, rng)) acc += beta[packed_index(b.i, b.j)] * beta[packed_index(b.i, b.j)];
    const double c_hat = total / (acc / draws);
    const double rel = std::abs(c_hat - c) / c;
    ok = ok && rel <= 0.02;
    details += (details.empty() ? "" : "; ") + std::string("n=") + std::to_string(n) + " c=" + fmt(c) + " estimate " +
               fmt(c_hat) + " (rel " + fmt(rel) + ")";
  }
  return {ok, details + " (tol 2%)"};
}

Outcome scaling_check() {
  const std::vector<std::size_t> sizes{128, 256, 512};
  struct Case {
    Algorithm algo;
    std::uint64_t iters;
    double expect;
  };
  const Case cases[] = {{Algorithm::rrsd_uni, 2000, 1.0}, {Algorithm::rrsd_multi, 200, 2.0}, {Algorithm::rgd, 2, 3.0}};
  std::string details;
  bool ok = true;
  for (const Case& cs : cases) {
    std::vector<double> xs, per_iter;
    for (std::size_t n : sizes) {
      const ProblemInstance p = gen_problem(n, 7, 0.0);
      SolverConfig c;
      c.algo = cs.algo;
      c.alpha = cs.algo == Algorithm::rgd ? 0.1 : 0.5;
      c.max_iters = cs.iters;
      const RunRecord r = run(p.spec(), c, CholeskyPoint::identity(n));
      xs.push_back(static_cast<double>(n));
      per_iter.push_back(static_cast<double>(r.rows.back().cum_flops - r.rows.front().cum_flops) / r.iterations);
    }
    const double slope = loglog_slope(xs, per_iter);
    ok = ok && std::abs(slope - cs.expect) <= 0.3;
    details += (details.empty() ? "" : "; ") + std::string(algorithm_name(cs.algo)) + " slope " + fmt(slope) +
               " (expect " + fmt(cs.expect) + "+-0.3)";
  }
  return {ok, details};
}

Outcome closed_form_check() {
  const std::size_t n = 50;
  const SymMatrix c = gen_problem(n, 7, 0.0).c;
  const SymMatrix id = SymMatrix::identity(n);
  struct Pattern {
    const char* name;
    SymMatrix c, d;
    double k;
  };
  const Pattern patterns[] = {
      {"C^1/2", c, id, 0.0},
      {"D^-1", SymMatrix(n), SymMatrix::symmetrize(c.matrix() + Matrix::identity(n)), -1.0},
      {"quadratic-root", c, id, -1.0},
  };
  std::string details;
  bool ok = true;
  for (const Pattern& pat : patterns) {
    const ClosedForm cf = closed_form_optimum(pat.c, pat.d, pat.k);
    const ObjectiveSpec spec = quad_logdet_spec(pat.c, pat.d, pat.k);
    for (Algorithm a : {Algorithm::rrsd_multi, Algorithm::rgsd_multi}) {
      // Chunks of 5000 iterations, checking the distance between chunks.
      CholeskyPoint x = CholeskyPoint::identity(n);
      double dist = distance(x, cf.x_star);
      std::uint64_t iters = 0;
      for (int chunk = 0; chunk < 300 && dist > 1e-4; ++chunk) {
        SolverConfig sc;
        sc.algo = a;
        sc.alpha = 0.5;
        sc.max_iters = 5000;
        sc.seed = 200 + chunk;
        sc.record_every = 5000;
        const RunRecord r = run(spec, sc, x, cf.f_star);
        if (r.status == RunStatus::diverged) break;
        x = r.final_point;
        iters += r.iterations;
        dist = distance(x, cf.x_star);
      }
      ok = ok && dist <= 1e-4;
      details += (details.empty() ? "" : "; ") + std::string(pat.name) + " " + std::string(algorithm_name(a)) + " d=" +
                 fmt(dist) + " after " + std::to_string(iters);
    }
  }
  return {ok, details + " (tol 1e-4)"};
}

Outcome strong_convexity_check() {
  Rng rng(106);
  std::string details;
  bool ok = true;
  const std::pair<SymMatrix, SymMatrix> instances[] = {
      {random_spd(6, rng), random_spd(6, rng)},
      {gen_problem(10, 7, 0.0).c, SymMatrix::identity(10)},
  };
  for (const auto& [c, d] : instances) {
    const StrongConvexity sc = strong_convexity_certificate(c, d, 1000, rng);
    const bool pass = sc.min_ratio >= sc.mu - 1e-9;
    ok = ok && pass;
    details += (details.empty() ? "" : "; ") + std::string("n=") + std::to_string(c.n()) + " mu=" + fmt(sc.mu) +
               " min ratio=" + fmt(sc.min_ratio);
  }
  return {ok, details + " over 1000 samples each"};
}

}  // namespace

int main() {
  criterion("condition_numbers", 1, condition_numbers_check);
  criterion("sparse_dense_equivalence", 30, sparse_dense_check);
  criterion("state_drift", 10, drift_check);
  criterion("convergence_reproduction", 300, convergence_check);
  criterion("rate_bound", 60, rate_bound_check);
  criterion("greedy_selection_bound", 30, greedy_bound_check);
  criterion("sampling_expectation", 30, sampling_check);
  criterion("complexity_scaling", 300, scaling_check);
  criterion("closed_form_optima", 120, closed_form_check);
  criterion("strong_convexity_certificate", 60, strong_convexity_check);
  std::printf("%d of 10 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
