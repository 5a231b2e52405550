#pragma once

// Benchmark instances tr(C X^-1) + tr(D X) + k log det X and the closed-form
// optima of the three patterns that have one.

#include <cstdint>
#include <optional>

#include "spdsd/manifold.hpp"
#include "spdsd/matrix.hpp"
#include "spdsd/objective.hpp"

namespace spdsd {

struct ClosedForm {
  CholeskyPoint x_star;
  double f_star = 0.0;
};

struct ProblemInstance {
  std::size_t n = 0;
  SymMatrix c;
  SymMatrix d;
  double k = 0.0;
  std::uint64_t seed = 0;
  std::optional<ClosedForm> optimum;

  ObjectiveSpec spec() const { return quad_logdet_spec(c, d, k); }
};

/// C = T T^T / n^2 with T_ij drawn uniformly from {1, ..., 10}, D = I.
/// T is filled row by row from Rng(seed).uniform_int(1, 10).
ProblemInstance gen_problem(std::size_t n, std::uint64_t seed, double k = 0.0);

/// Recognized patterns:
///   D = I, k = 0   ->  X* = C^1/2
///   C = 0, k = -1  ->  X* = D^-1
///   D = I, k = -1  ->  X* = V diag((1 + sqrt(1 + 4 lambda)) / 2) V^T for C = V diag(lambda) V^T
/// Throws NoClosedForm otherwise, and NotPositiveDefinite when C (first
/// case), D (second case) is not positive definite or C (third case) is not PSD.
ClosedForm closed_form_optimum(const SymMatrix& c, const SymMatrix& d, double k, const Exec& ex = {});

/// Fills inst.optimum when a closed form exists; leaves it empty otherwise.
void attach_optimum(ProblemInstance& inst, const Exec& ex = {});

/// True when every entry equals the identity (or zero) exactly.
bool is_identity(const SymMatrix& m);
bool is_zero(const SymMatrix& m);

}  // namespace spdsd
