#pragma once

// Independent oracles: finite differences, the Hessian quadratic form of the
// trace objectives, strong-convexity and smoothness certificates, condition
// numbers at the optimum and a dense reference for the sparse update path.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "spdsd/basis.hpp"
#include "spdsd/manifold.hpp"
#include "spdsd/objective.hpp"
#include "spdsd/rng.hpp"

namespace spdsd {

struct VerificationReport {
  std::string check;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string details;

  /// pass = residual <= tolerance (false for NaN residuals).
  static VerificationReport make(std::string check, double residual, double tolerance, std::string details = {});
};

inline constexpr const char* kReportCsvHeader = "check,residual,tolerance,pass";
void write_report_csv(std::ostream& os, const std::vector<VerificationReport>& reports);

/// Compares (f(Exp_X(h xi)) - f(X)) / h with <grad^R f(X), xi>_X for each h.
/// The residual is the best relative error over the sequence; tolerance 1e-5.
VerificationReport fd_directional_check(const ObjectiveSpec& spec, const CholeskyPoint& at, const SymMatrix& xi,
                                        const std::vector<double>& h_sequence = {1e-3, 1e-4, 1e-5, 1e-6, 1e-7});

/// tr(D V X^-1 V) + tr(V X^-1 V X^-1 C X^-1): the second derivative of
/// tr(C X^-1) + tr(D X) along the geodesic with velocity V. A k log det X term
/// adds nothing (it is linear along geodesics).
double hessian_quadratic_form(const SymMatrix& c, const SymMatrix& d, const CholeskyPoint& at, const SymMatrix& v);

struct StrongConvexity {
  double mu = 0.0;
  double min_ratio = 0.0;  // smallest Hessian form / ||V||_X^2 seen
  VerificationReport report;
};

/// mu = min(lambda_min(C), lambda_min(D)). Samples X = exp(sigma W) and
/// V = sigma W' with W, W' standard Gaussian symmetric and sigma alternating
/// between 0.1 and 1, and checks form >= mu ||V||_X^2 - 1e-9 (relative to
/// ||V||_X^2). Throws NotPositiveDefinite when mu <= 0.
StrongConvexity strong_convexity_certificate(const SymMatrix& c, const SymMatrix& d, std::size_t samples, Rng& rng);

struct LipschitzBall {
  double radius = 0.0;
  double L = 0.0;
  VerificationReport report;
};

/// L = e^R + e^-R for C = D = I on the ball of radius R around I; checks
/// lambda^2 + 1 - L lambda <= 0 on a 1000-point grid of [e^-R, e^R].
LipschitzBall lipschitz_ball_certificate(double radius);

struct ConditionNumbers {
  double kappa1 = 0.0;  // with the -log det term, sqrt((1 + 4 lmax) / (1 + 4 lmin))
  double kappa2 = 0.0;  // without it, sqrt(lmax / lmin)
};

/// At the optimum with D = I. Throws NotPositiveDefinite unless C is SPD.
ConditionNumbers condition_numbers(const SymMatrix& c);

/// X^1/2 exp(X^-1/2 xi X^-1/2) X^1/2 with xi = -alpha sum beta B E_ij B^T,
/// using only eigendecompositions. Intended for n <= 32.
CholeskyPoint dense_step_oracle(const CholeskyPoint& at, const DirectionSet& dirs, double alpha);

/// f(Y) >= f(X) + <grad^R f(X), xi_XY>_X + mu/2 ||xi_XY||_X^2 over sampled
/// pairs, xi_XY = log_map(X, Y). Residual is the worst relative violation.
VerificationReport strong_convexity_pairs_check(const ObjectiveSpec& spec, double mu, std::size_t samples, Rng& rng);

/// (2/mu) ||grad^R f(X)||_X^2 >= f(X) - f* at sampled X.
VerificationReport gradient_domination_check(const ObjectiveSpec& spec, double mu, double f_star, std::size_t samples,
                                             Rng& rng);

/// The suite behind the `verify` command.
std::vector<VerificationReport> run_verify_suite(std::uint64_t seed);

}  // namespace spdsd
