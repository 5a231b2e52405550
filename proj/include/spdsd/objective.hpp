#pragma once

// Objectives of the form
//   f(X) = g(tr(C_1 X^-1), ..., tr(C_P X^-1), tr(D_1 X), ..., tr(D_Q X), log det X)
// together with the per-run state that makes Riemannian gradient
// coordinates cheap: M1_p = B^-1 C_p B^-T, M2_q = B^T D_q B and log det X.
// With those, F(X) = B^-1 grad^R f(X) B^-T is
//   F = -sum_p g1_p M1_p + sum_q g2_q M2_q + g3 I,
// where g1, g2, g3 are the partials of g at the current trace arguments.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "spdsd/basis.hpp"
#include "spdsd/dense.hpp"
#include "spdsd/manifold.hpp"
#include "spdsd/matrix.hpp"

namespace spdsd {

struct GArgs {
  std::span<const double> f1;  // tr(C_p X^-1)
  std::span<const double> f2;  // tr(D_q X)
  double f3 = 0.0;             // log det X
};

struct GPartials {
  std::vector<double> d1;
  std::vector<double> d2;
  double d3 = 0.0;
};

/// The outer function g with exact partial derivatives.
class OuterFunction {
 public:
  virtual ~OuterFunction() = default;
  virtual std::string name() const = 0;
  virtual double value(const GArgs& a) const = 0;
  /// Fills `out`; d1 and d2 are resized to match the arguments.
  virtual void partials(const GArgs& a, GPartials& out) const = 0;
  /// Number of samples for finite-sum objectives, 0 otherwise.
  virtual std::size_t samples() const { return 0; }
  /// The per-sample outer function h of a finite sum.
  virtual std::shared_ptr<const OuterFunction> per_sample() const { return nullptr; }
};

/// sum f1 + sum f2 + k f3. k = 0 and k = -1 are the two covariance-style
/// objectives used in the benchmarks.
class QuadLogDet final : public OuterFunction {
 public:
  explicit QuadLogDet(double k) : k_(k) {}
  std::string name() const override { return "quadlogdet"; }
  double value(const GArgs& a) const override;
  void partials(const GArgs& a, GPartials& out) const override;
  double k() const { return k_; }

 private:
  double k_;
};

/// a log(exp(b1 f3) + b2) - c f3 + sum f1 + sum f2, i.e.
/// a log(det(X)^b1 + b2) - c log det X plus any plain trace terms.
class LogDetComposite final : public OuterFunction {
 public:
  LogDetComposite(double a, double b1, double b2, double c);
  std::string name() const override { return "logdetcomposite"; }
  double value(const GArgs& a) const override;
  void partials(const GArgs& a, GPartials& out) const override;

 private:
  double a_, b1_, b2_, c_;
};

/// sum_s h(f1_s, f2_s, f3) over S samples, where h takes one C and one D.
class FiniteSum final : public OuterFunction {
 public:
  FiniteSum(std::shared_ptr<const OuterFunction> h, std::size_t samples);
  std::string name() const override { return "finitesum"; }
  double value(const GArgs& a) const override;
  void partials(const GArgs& a, GPartials& out) const override;
  std::size_t samples() const override { return samples_; }
  std::shared_ptr<const OuterFunction> per_sample() const override { return h_; }

 private:
  std::shared_ptr<const OuterFunction> h_;
  std::size_t samples_;
};

struct ObjectiveSpec {
  std::vector<SymMatrix> c;
  std::vector<SymMatrix> d;
  std::shared_ptr<const OuterFunction> g;

  std::size_t n() const;
  /// Throws DimensionMismatch on inconsistent sizes or a missing g.
  void validate() const;
  /// Spec of sample s of a finite sum (one C, one D, g = h).
  ObjectiveSpec sample(std::size_t s) const;
};

/// Convenience: tr(C X^-1) + tr(D X) + k log det X.
ObjectiveSpec quad_logdet_spec(SymMatrix c, SymMatrix d, double k);

struct ObjectiveState {
  std::size_t n = 0;
  std::vector<SymMatrix> m1;
  std::vector<SymMatrix> m2;
  std::vector<double> f1;  // traces of m1, maintained incrementally
  std::vector<double> f2;
  double logdet = 0.0;
  GPartials partials;      // of g at (f1, f2, logdet)
  std::uint64_t advances_since_refresh = 0;
};

/// Exact scalar arguments are recomputed every this many advances.
inline constexpr std::uint64_t kRefreshInterval = 10000;

ObjectiveState init_state(const ObjectiveSpec& spec, const CholeskyPoint& at, const Exec& ex = {});

double value(const ObjectiveSpec& spec, const ObjectiveState& st);

/// F(X)_ij for j <= i. Charges P + Q + 1 flops and one F entry.
double f_entry(const ObjectiveState& st, BasisIndex idx, const Exec& ex = {});
/// beta_ij = sqrt(2)^(i != j) F_ij.
double beta_coeff(const ObjectiveState& st, BasisIndex idx, const Exec& ex = {});

/// Packed lower triangle of F(X). Charges (P + Q + 1) per entry and
/// n(n+1)/2 F entries.
std::vector<double> lower_F(const ObjectiveState& st, const Exec& ex = {});
/// Full symmetric F(X), same charges as lower_F.
SymMatrix full_F(const ObjectiveState& st, const Exec& ex = {});

/// sum of beta^2 over the packed table = ||grad^R f||_X^2.
double grad_norm_sq(std::span<const double> packed_F, std::size_t n);

/// M1 <- f^-1 M1 f^-T, M2 <- f^T M2 f, log det += 2 log det f; refreshes the
/// partials. Charges 8n per 2x2 block and 2n per 1x1 block for every matrix.
void advance_state(const ObjectiveSpec& spec, ObjectiveState& st, const UpdateFactor& f, const CholeskyPoint& at,
                   const Exec& ex = {});

/// Recomputes traces and log det exactly from the state matrices and B.
void refresh_scalars(const ObjectiveSpec& spec, ObjectiveState& st, const CholeskyPoint& at);

/// Euclidean gradient -sum g1 X^-1 C X^-1 + sum g2 D + g3 X^-1 (dense).
SymMatrix euclidean_grad(const ObjectiveSpec& spec, const CholeskyPoint& at, const Exec& ex = {});

/// Direct dense evaluation from X, independent of the maintained state.
double dense_value(const ObjectiveSpec& spec, const CholeskyPoint& at, const Exec& ex = {});

}  // namespace spdsd
