#pragma once

// Experiment suites: generated covariance-style instances, one run per
// (size, algorithm), per-run CSVs and a summary, plus the equal-budget
// comparisons used to rank methods by directions, F-entries and flops.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "spdsd/problem.hpp"
#include "spdsd/solvers.hpp"

namespace spdsd {

/// paper-f1: tr(C X^-1) + tr(X) - log det X.  paper-f2: tr(C X^-1) + tr(X).
struct Suite {
  std::string name;
  double k = 0.0;
};
/// Throws ConfigError.
Suite parse_suite(std::string_view name);

struct BenchConfig {
  std::string suite = "paper-f2";
  std::vector<std::size_t> sizes{100, 500};
  /// Sizes above 500 are refused unless set.
  bool allow_large = false;
  /// rgsd-uni is opt-in: at alpha = 0.5 it can drive one diagonal
  /// coordinate past the stable step size on the generated instances.
  std::vector<Algorithm> algos{Algorithm::rgd, Algorithm::rrsd_uni, Algorithm::rrsd_multi, Algorithm::rgsd_multi};
  double alpha = 0.5;      // coordinate methods
  double rgd_alpha = 0.1;  // dense baseline
  std::uint64_t seed = 7;
  /// Directions per run; 0 means 300 d, the cost of 300 full gradient steps.
  std::uint64_t budget = 0;
  /// Hard cap on iterations per run (0: none beyond the budget).
  std::uint64_t max_iters = 0;
  /// Runs stop at gap <= tol * D0.
  double tol = 1e-6;
  /// Rows kept per run; 0 picks about 1000 rows per run.
  std::uint64_t record_every = 0;
  Backend backend = Backend::serial;
  /// Directory for CSV output; empty keeps everything in memory.
  std::filesystem::path out;

  /// Throws ConfigError.
  void validate() const;
  std::uint64_t budget_for(std::size_t n) const;
};

struct BenchRun {
  std::size_t n = 0;
  Algorithm algo = Algorithm::rgd;
  double alpha = 0.0;
  double tol_abs = 0.0;
  std::uint64_t record_every = 1;
  RunRecord record;
  std::filesystem::path csv;  // empty when nothing was written
};

/// Runs every (size, algorithm) pair, in parallel across runs. Each run
/// starts from X0 = I on gen_problem(n, seed, suite.k) with its closed-form
/// optimum. Writes <out>/<suite>_n<n>_<algo>.csv and <out>/<suite>_summary.csv
/// when out is set (IoError on failure).
std::vector<BenchRun> run_bench(const BenchConfig& config);

/// One row per run; every effective setting is repeated on each row.
void write_summary_csv(std::ostream& os, const BenchConfig& config, const std::vector<BenchRun>& runs);

enum class Metric { directions, F_entries, flops };
std::string_view metric_name(Metric m);
std::uint64_t metric_of(const RunRow& row, Metric m);

/// Gap at the last recorded row whose metric does not exceed budget. A run
/// that converged before the budget keeps its final gap.
double gap_at_budget(const RunRecord& rec, Metric m, std::uint64_t budget);

/// The largest budget every unconverged run reached (smallest final metric
/// among them); falls back to all runs when every run converged.
std::uint64_t common_budget(const std::vector<const RunRecord*>& runs, Metric m);

struct BudgetComparison {
  Metric metric = Metric::directions;
  std::uint64_t budget = 0;
  std::vector<std::pair<Algorithm, double>> gaps;

  /// Throws std::out_of_range when algo was not part of the comparison.
  double gap(Algorithm algo) const;
};

/// Compares the runs of one size at their common budget.
BudgetComparison compare_at_budget(const std::vector<BenchRun>& runs, std::size_t n, Metric m);

}  // namespace spdsd
