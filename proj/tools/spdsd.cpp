// spdsd: solve, bench, verify and gen subcommands.
//
// Exit codes: 0 success, 1 divergence (or a failed verification check),
// 2 configuration error, 3 IO error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spdsd/bench.hpp"
#include "spdsd/error.hpp"
#include "spdsd/io.hpp"
#include "spdsd/problem.hpp"
#include "spdsd/solvers.hpp"
#include "spdsd/verify.hpp"

using namespace spdsd;

namespace {

enum Exit { kOk = 0, kDiverged = 1, kConfig = 2, kIo = 3 };

// Config-file values fill options that were not given on the command line.
void apply_config(CLI::App& sub, const std::string& path) {
  if (path.empty()) return;
  for (const auto& [key, value] : load_config(path)) {
    CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") throw ConfigError(path + ": unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    try {
      opt->add_result(value);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw ConfigError(path + ": bad value for '" + key + "': " + e.what());
    }
  }
}

Backend parse_backend(const std::string& s) {
  if (s == "serial") return Backend::serial;
  if (s == "parallel") return Backend::parallel;
  if (s == "default") return default_backend();
  throw ConfigError("unknown backend '" + s + "' (serial, parallel or default)");
}

template <class Fn>
void write_to(const std::string& out, Fn&& fn) {
  if (out.empty() || out == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream os(out);
  if (!os) throw IoError("cannot write " + out);
  fn(os);
  if (!os) throw IoError("write failed: " + out);
}

struct SolveArgs {
  std::string config, algo = "rrsd-multi", out, problem_file, backend = "default";
  std::size_t n = 100;
  std::uint64_t seed = 7, steps = 1000, check_every = 100, record_every = 1;
  double alpha = 0.5, tol = 0.0, k = 0.0;
};

int cmd_solve(const SolveArgs& a) {
  SolverConfig sc;
  sc.algo = parse_algorithm(a.algo);
  sc.alpha = a.alpha;
  sc.max_iters = a.steps;
  sc.tol = a.tol;
  sc.seed = a.seed;
  sc.check_every = a.check_every;
  sc.record_every = a.record_every;
  sc.backend = parse_backend(a.backend);
  sc.validate();

  ObjectiveSpec spec;
  std::optional<double> f_star;
  if (!a.problem_file.empty()) {
    const ProblemFile pf = load_problem(a.problem_file);
    spec = pf.spec;
    const auto* q = dynamic_cast<const QuadLogDet*>(spec.g.get());
    if (q && spec.c.size() == 1 && spec.d.size() == 1) {
      try {
        f_star = closed_form_optimum(spec.c[0], spec.d[0], q->k()).f_star;
      } catch (const NoClosedForm&) {
      }
    }
  } else {
    ProblemInstance p = gen_problem(a.n, a.seed, a.k);
    attach_optimum(p);
    spec = p.spec();
    f_star = p.optimum->f_star;
  }
  const std::size_t n = spec.n();
  if (n == 0) throw ConfigError("the problem has no matrices, so its dimension is unknown");

  const RunRecord r = run(spec, sc, CholeskyPoint::identity(n), f_star);
  write_to(a.out, [&](std::ostream& os) { write_run_csv(os, r.rows); });
  const RunRow& last = r.rows.back();
  std::cerr << algorithm_name(r.algo) << " n=" << n << ": " << status_name(r.status) << " after " << r.iterations
            << " iterations, f=" << format_double(last.f_value);
  if (f_star) std::cerr << " gap=" << format_double(last.gap);
  std::cerr << " directions=" << last.cum_directions << " F_entries=" << last.cum_F_entries
            << " flops=" << last.cum_flops << '\n';
  if (r.status == RunStatus::diverged) {
    std::cerr << "diverged at " << r.message << '\n';
    return kDiverged;
  }
  return kOk;
}

struct BenchArgs {
  std::string config, suite = "paper-f2", out = "bench_out", backend = "serial";
  std::vector<std::size_t> sizes{100, 500};
  std::vector<std::string> algos;
  bool large = false;
  std::uint64_t seed = 7, budget = 0, steps = 0, record_every = 0;
  double alpha = 0.5, rgd_alpha = 0.1, tol = 1e-6;
};

int cmd_bench(const BenchArgs& a) {
  BenchConfig bc;
  bc.suite = a.suite;
  bc.sizes = a.sizes;
  bc.allow_large = a.large;
  if (!a.algos.empty()) {
    bc.algos.clear();
    for (const std::string& s : a.algos) bc.algos.push_back(parse_algorithm(s));
  }
  bc.alpha = a.alpha;
  bc.rgd_alpha = a.rgd_alpha;
  bc.seed = a.seed;
  bc.budget = a.budget;
  bc.max_iters = a.steps;
  bc.tol = a.tol;
  bc.record_every = a.record_every;
  bc.backend = parse_backend(a.backend);
  bc.out = a.out;
  bc.validate();
  std::error_code ec;
  std::filesystem::create_directories(bc.out, ec);
  if (ec) throw IoError("cannot create " + a.out + ": " + ec.message());

  const std::vector<BenchRun> runs = run_bench(bc);
  bool diverged = false;
  for (const BenchRun& r : runs) {
    std::cout << std::left << "n=" << std::setw(5) << r.n << std::setw(11) << algorithm_name(r.algo) << ' '
              << std::setw(9) << status_name(r.record.status) << " iters=" << std::setw(9) << r.record.iterations
              << " gap=" << r.record.rows.back().gap << '\n';
    if (r.record.status == RunStatus::diverged) {
      diverged = true;
      std::cerr << "n=" << r.n << ' ' << algorithm_name(r.algo) << " diverged at " << r.record.message << '\n';
    }
  }
  for (std::size_t n : bc.sizes)
    for (Metric m : {Metric::directions, Metric::F_entries, Metric::flops}) {
      const BudgetComparison cmp = compare_at_budget(runs, n, m);
      std::cout << "n=" << n << " gap at " << metric_name(m) << " budget " << cmp.budget << ':';
      for (const auto& [algo, gap] : cmp.gaps) std::cout << ' ' << algorithm_name(algo) << '=' << gap;
      std::cout << '\n';
    }
  std::cout << "wrote " << (bc.out / (bc.suite + "_summary.csv")).string() << '\n';
  return diverged ? kDiverged : kOk;
}

int cmd_verify(std::uint64_t seed, const std::string& out) {
  const std::vector<VerificationReport> reports = run_verify_suite(seed);
  bool all = true;
  for (const VerificationReport& r : reports) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << std::left << std::setw(30) << r.check << " residual=" << std::setw(13)
              << r.residual << " tol=" << r.tolerance;
    if (!r.details.empty()) std::cout << "  " << r.details;
    std::cout << '\n';
    all = all && r.pass;
  }
  if (!out.empty()) write_to(out, [&](std::ostream& os) { write_report_csv(os, reports); });
  return all ? kOk : kDiverged;
}

int cmd_gen(std::size_t n, std::uint64_t seed, double k, const std::string& out) {
  const ProblemInstance p = gen_problem(n, seed, k);
  write_to(out, [&](std::ostream& os) { write_problem(os, p); });
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian subspace descent on SPD matrices"};
  app.require_subcommand(1);

  SolveArgs sa;
  CLI::App* solve = app.add_subcommand("solve", "Run one solver and write its run CSV");
  solve->add_option("--config", sa.config, "key=value file; command-line flags take precedence");
  solve->add_option("--algo", sa.algo, "rgd, rrsd-uni, rrsd-multi, rgsd-uni, rgsd-multi or rsgd");
  solve->add_option("--n", sa.n, "Dimension of the generated instance")->check(CLI::Range(2, 1 << 20));
  solve->add_option("--seed", sa.seed, "Seed for the generator and the solver");
  solve->add_option("--alpha", sa.alpha, "Step size");
  solve->add_option("--steps", sa.steps, "Iteration limit");
  solve->add_option("--tol", sa.tol, "Stop at gap <= tol, or squared gradient norm <= tol when f* is unknown");
  solve->add_option("--k", sa.k, "Coefficient of log det X in the generated instance");
  solve->add_option("--out", sa.out, "Run CSV path (default stdout)");
  solve->add_option("--problem-file", sa.problem_file, "Problem file instead of a generated instance");
  solve->add_option("--check-every", sa.check_every, "Iterations between gradient-norm checks");
  solve->add_option("--record-every", sa.record_every, "Iterations between CSV rows");
  solve->add_option("--backend", sa.backend, "serial, parallel or default");

  BenchArgs ba;
  CLI::App* bench = app.add_subcommand("bench", "Run a suite and write per-run and summary CSVs");
  bench->add_option("--config", ba.config, "key=value file; command-line flags take precedence");
  bench->add_option("--suite", ba.suite, "paper-f1 (with -log det X) or paper-f2");
  bench->add_option("--sizes", ba.sizes, "Dimensions")->delimiter(',');
  bench->add_flag("--large", ba.large, "Allow sizes above 500");
  bench->add_option("--algo", ba.algos, "Algorithms (default: rgd, rrsd-uni, rrsd-multi, rgsd-multi)")->delimiter(',');
  bench->add_option("--alpha", ba.alpha, "Step size of the coordinate methods");
  bench->add_option("--rgd-alpha", ba.rgd_alpha, "Step size of rgd");
  bench->add_option("--seed", ba.seed, "Generator and solver seed");
  bench->add_option("--budget", ba.budget, "Directions per run (default 300 n(n+1)/2)");
  bench->add_option("--steps", ba.steps, "Iteration cap per run (default none)");
  bench->add_option("--tol", ba.tol, "Stop at gap <= tol * D0");
  bench->add_option("--record-every", ba.record_every, "Iterations between CSV rows (default about 1000 rows)");
  bench->add_option("--out", ba.out, "Output directory");
  bench->add_option("--backend", ba.backend, "Kernel backend inside each run");

  std::uint64_t verify_seed = 1;
  std::string verify_out;
  CLI::App* verify = app.add_subcommand("verify", "Run the oracle suite and print one line per check");
  verify->add_option("--seed", verify_seed, "Sampling seed");
  verify->add_option("--out", verify_out, "Report CSV path");

  std::size_t gen_n = 100;
  std::uint64_t gen_seed = 7;
  double gen_k = 0.0;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("gen", "Write a generated problem file");
  gen->add_option("--n", gen_n, "Dimension")->check(CLI::Range(2, 1 << 20));
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_option("--k", gen_k, "Coefficient of log det X");
  gen->add_option("--out", gen_out, "Problem file path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (solve->parsed()) {
      apply_config(*solve, sa.config);
      return cmd_solve(sa);
    }
    if (bench->parsed()) {
      apply_config(*bench, ba.config);
      return cmd_bench(ba);
    }
    if (verify->parsed()) return cmd_verify(verify_seed, verify_out);
    return cmd_gen(gen_n, gen_seed, gen_k, gen_out);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
}
