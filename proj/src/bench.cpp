#include "spdsd/bench.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "spdsd/error.hpp"
#include "spdsd/io.hpp"

namespace spdsd {

namespace {

constexpr std::size_t kLargeSize = 500;
constexpr std::uint64_t kTargetRows = 1000;

// Rough directions per iteration, only used to space recorded rows.
std::uint64_t directions_per_iter(Algorithm a, std::size_t n) {
  const std::uint64_t d = n * (n + 1) / 2;
  switch (a) {
    case Algorithm::rgd:
    case Algorithm::rsgd: return d;
    case Algorithm::rrsd_multi: return std::max<std::uint64_t>(1, 3 * n / 4);
    case Algorithm::rgsd_multi: return std::max<std::uint64_t>(1, n / 2);
    default: return 1;
  }
}

const char* backend_label(Backend b) { return b == Backend::serial ? "serial" : "parallel"; }

}  // namespace

Suite parse_suite(std::string_view name) {
  if (name == "paper-f1") return {"paper-f1", -1.0};
  if (name == "paper-f2") return {"paper-f2", 0.0};
  throw ConfigError("unknown suite '" + std::string(name) + "' (expected paper-f1 or paper-f2)");
}

void BenchConfig::validate() const {
  parse_suite(suite);
  if (sizes.empty()) throw ConfigError("no sizes given");
  for (std::size_t n : sizes) {
    if (n < 2) throw ConfigError("sizes must be at least 2");
    if (n > kLargeSize && !allow_large)
      throw ConfigError("size " + std::to_string(n) + " exceeds " + std::to_string(kLargeSize) + "; pass --large to allow it");
  }
  if (algos.empty()) throw ConfigError("no algorithms given");
  for (Algorithm a : algos)
    if (a == Algorithm::rsgd) throw ConfigError("rsgd needs a finite-sum objective and is not part of the suites");
  if (!(alpha > 0.0) || !std::isfinite(alpha) || !(rgd_alpha > 0.0) || !std::isfinite(rgd_alpha))
    throw ConfigError("step sizes must be positive and finite");
  if (!(tol >= 0.0)) throw ConfigError("tol must be non-negative");
}

std::uint64_t BenchConfig::budget_for(std::size_t n) const { return budget ? budget : 300 * (n * (n + 1) / 2); }

std::vector<BenchRun> run_bench(const BenchConfig& config) {
  config.validate();
  const Suite suite = parse_suite(config.suite);

  std::vector<ProblemInstance> problems;
  for (std::size_t n : config.sizes) {
    problems.push_back(gen_problem(n, config.seed, suite.k));
    attach_optimum(problems.back());
  }

  std::vector<BenchRun> runs;
  for (std::size_t p = 0; p < problems.size(); ++p)
    for (Algorithm a : config.algos) {
      BenchRun r;
      r.n = problems[p].n;
      r.algo = a;
      r.alpha = a == Algorithm::rgd ? config.rgd_alpha : config.alpha;
      const std::uint64_t budget = config.budget_for(r.n);
      r.record_every = config.record_every
                           ? config.record_every
                           : std::max<std::uint64_t>(1, budget / (directions_per_iter(a, r.n) * kTargetRows));
      runs.push_back(std::move(r));
    }

  std::vector<std::exception_ptr> errors(runs.size());
  // Largest runs first so the tail of the schedule is short.
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t k = static_cast<std::ptrdiff_t>(runs.size()) - 1; k >= 0; --k) {
    BenchRun& r = runs[static_cast<std::size_t>(k)];
    try {
      const ProblemInstance& prob =
          problems[static_cast<std::size_t>(std::find(config.sizes.begin(), config.sizes.end(), r.n) - config.sizes.begin())];
      const ObjectiveSpec spec = prob.spec();
      const CholeskyPoint x0 = CholeskyPoint::identity(r.n);
      const double d0 = dense_value(spec, x0) - prob.optimum->f_star;
      r.tol_abs = config.tol * d0;
      SolverConfig sc;
      sc.algo = r.algo;
      sc.alpha = r.alpha;
      sc.max_iters = config.max_iters ? config.max_iters : std::numeric_limits<std::uint64_t>::max();
      sc.max_directions = config.budget_for(r.n);
      sc.tol = r.tol_abs;
      sc.seed = config.seed;
      sc.record_every = r.record_every;
      sc.backend = config.backend;
      r.record = run(spec, sc, x0, prob.optimum->f_star);
      if (!config.out.empty()) {
        r.csv = config.out / (suite.name + "_n" + std::to_string(r.n) + "_" + std::string(algorithm_name(r.algo)) + ".csv");
        save_run_csv(r.csv, r.record.rows);
      }
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);

  if (!config.out.empty()) {
    const std::filesystem::path path = config.out / (suite.name + "_summary.csv");
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    write_summary_csv(os, config, runs);
    if (!os) throw IoError("write failed: " + path.string());
  }
  return runs;
}

void write_summary_csv(std::ostream& os, const BenchConfig& config, const std::vector<BenchRun>& runs) {
  const Suite suite = parse_suite(config.suite);
  os << "suite,k,seed,n,algo,alpha,tol_rel,tol_abs,budget_directions,max_iters,record_every,backend,status,iterations,"
        "f0,f_star,d0,final_gap,cum_directions,cum_F_entries,cum_flops,elapsed_ns,csv\n";
  for (const BenchRun& r : runs) {
    const RunRow& last = r.record.rows.back();
    os << suite.name << ',' << format_double(suite.k) << ',' << config.seed << ',' << r.n << ',' << algorithm_name(r.algo)
       << ',' << format_double(r.alpha) << ',' << format_double(config.tol) << ',' << format_double(r.tol_abs) << ','
       << config.budget_for(r.n) << ',' << config.max_iters << ',' << r.record_every << ','
       << backend_label(config.backend) << ',' << status_name(r.record.status) << ',' << r.record.iterations << ','
       << format_double(r.record.f0) << ',' << format_double(r.record.f_star.value_or(std::nan(""))) << ','
       << format_double(r.record.d0) << ',' << format_double(last.gap) << ',' << last.cum_directions << ','
       << last.cum_F_entries << ',' << last.cum_flops << ',' << last.elapsed_ns << ',' << r.csv.filename().string()
       << '\n';
  }
}

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::directions: return "directions";
    case Metric::F_entries: return "F_entries";
    case Metric::flops: return "flops";
  }
  return "unknown";
}

std::uint64_t metric_of(const RunRow& row, Metric m) {
  switch (m) {
    case Metric::directions: return row.cum_directions;
    case Metric::F_entries: return row.cum_F_entries;
    case Metric::flops: return row.cum_flops;
  }
  return 0;
}

double gap_at_budget(const RunRecord& rec, Metric m, std::uint64_t budget) {
  if (rec.rows.empty()) throw std::invalid_argument("gap_at_budget: empty record");
  double gap = rec.rows.front().gap;
  for (const RunRow& row : rec.rows) {
    if (metric_of(row, m) > budget) break;
    gap = row.gap;
  }
  return gap;
}

std::uint64_t common_budget(const std::vector<const RunRecord*>& runs, Metric m) {
  std::uint64_t open = std::numeric_limits<std::uint64_t>::max(), all = open;
  for (const RunRecord* r : runs) {
    const std::uint64_t last = metric_of(r->rows.back(), m);
    all = std::min(all, last);
    if (r->status != RunStatus::converged) open = std::min(open, last);
  }
  return open != std::numeric_limits<std::uint64_t>::max() ? open : all;
}

double BudgetComparison::gap(Algorithm algo) const {
  for (const auto& [a, g] : gaps)
    if (a == algo) return g;
  throw std::out_of_range("algorithm not in comparison: " + std::string(algorithm_name(algo)));
}

BudgetComparison compare_at_budget(const std::vector<BenchRun>& runs, std::size_t n, Metric m) {
  std::vector<const RunRecord*> recs;
  for (const BenchRun& r : runs)
    if (r.n == n) recs.push_back(&r.record);
  if (recs.empty()) throw std::invalid_argument("no runs of size " + std::to_string(n));
  BudgetComparison cmp;
  cmp.metric = m;
  cmp.budget = common_budget(recs, m);
  for (const BenchRun& r : runs)
    if (r.n == n) cmp.gaps.emplace_back(r.algo, gap_at_budget(r.record, m, cmp.budget));
  return cmp;
}

}  // namespace spdsd
