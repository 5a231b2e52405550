#pragma once

// Step functions and the run loop for the Riemannian descent methods.
//
// Coordinate methods (rrsd_*, rgsd_*) keep an ObjectiveState in lockstep with
// the point and touch O(n) entries per direction. rgd and rsgd are the dense
// O(n^3) baselines and recompute everything from B each step.

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spdsd/basis.hpp"
#include "spdsd/flops.hpp"
#include "spdsd/manifold.hpp"
#include "spdsd/objective.hpp"
#include "spdsd/rng.hpp"

namespace spdsd {

enum class Algorithm { rgd, rrsd_uni, rrsd_multi, rgsd_uni, rgsd_multi, rsgd };

/// Hyphenated names ("rrsd-multi"); parse_algorithm also accepts underscores.
std::string_view algorithm_name(Algorithm a);
/// Throws ConfigError on unknown names.
Algorithm parse_algorithm(std::string_view name);
bool is_coordinate(Algorithm a);

struct SolverConfig {
  Algorithm algo = Algorithm::rrsd_multi;
  double alpha = 0.5;
  std::uint64_t max_iters = 1000;
  /// Also stop once this many directions have been used. 0 disables.
  std::uint64_t max_directions = 0;
  /// Stop when gap <= tol (f* known) or ||grad^R||^2 <= tol (unknown). 0 disables.
  double tol = 0.0;
  std::uint64_t seed = 1;
  /// Iterations between gradient-norm checks when f* is unknown.
  std::uint64_t check_every = 100;
  /// Iterations between recorded rows; the last iterate is always recorded.
  std::uint64_t record_every = 1;
  Backend backend = default_backend();

  /// Throws ConfigError.
  void validate() const;
};

/// Point plus the maintained objective state (empty for the dense methods).
struct Iterate {
  CholeskyPoint x;
  ObjectiveState st;
};

// Each step returns the number of basis directions it moved along.

std::uint64_t rgd_step(const ObjectiveSpec& spec, CholeskyPoint& x, double alpha, const Exec& ex = {});
std::uint64_t rrsd_uni_step(const ObjectiveSpec& spec, Iterate& it, double alpha, Rng& rng, const Exec& ex = {});
std::uint64_t rrsd_multi_step(const ObjectiveSpec& spec, Iterate& it, double alpha, Rng& rng, const Exec& ex = {});
std::uint64_t rgsd_uni_step(const ObjectiveSpec& spec, Iterate& it, double alpha, const Exec& ex = {});
std::uint64_t rgsd_multi_step(const ObjectiveSpec& spec, Iterate& it, double alpha, const Exec& ex = {});
/// Samples s uniformly and steps along -alpha S grad^R f_s.
std::uint64_t rsgd_step(const ObjectiveSpec& spec, CholeskyPoint& x, double alpha, Rng& rng, const Exec& ex = {});

/// Index (into the packed table) of the largest beta^2; ties go to the first.
std::size_t argmax_beta_sq(std::span<const double> packed_F, std::size_t n);

struct RunRow {
  std::uint64_t iter = 0;
  double f_value = 0.0;
  double gap = 0.0;  // NaN when f* is unknown
  std::uint64_t cum_directions = 0;
  std::uint64_t cum_F_entries = 0;
  std::uint64_t cum_flops = 0;
  std::int64_t elapsed_ns = 0;
};

enum class RunStatus { max_iters, budget, converged, diverged };
std::string_view status_name(RunStatus s);

struct RunRecord {
  Algorithm algo = Algorithm::rrsd_multi;
  std::vector<RunRow> rows;
  double f0 = 0.0;
  /// f0 - f* when f* is known, max(|f0|, 1) otherwise.
  double d0 = 0.0;
  std::optional<double> f_star;
  RunStatus status = RunStatus::max_iters;
  std::string message;
  std::uint64_t iterations = 0;
  CholeskyPoint final_point;
};

/// Runs config.algo from x0. Step failures (Overflow, loss of positive
/// definiteness) and growth beyond f0 + 1e3 D0 end the run with status
/// diverged and a message naming the iteration; they are not rethrown.
RunRecord run(const ObjectiveSpec& spec, const SolverConfig& config, const CholeskyPoint& x0,
              std::optional<double> f_star = std::nullopt);

}  // namespace spdsd
