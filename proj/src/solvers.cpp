#include "spdsd/solvers.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "spdsd/error.hpp"

namespace spdsd {

namespace {

constexpr std::pair<Algorithm, std::string_view> kNames[] = {
    {Algorithm::rgd, "rgd"},           {Algorithm::rrsd_uni, "rrsd-uni"}, {Algorithm::rrsd_multi, "rrsd-multi"},
    {Algorithm::rgsd_uni, "rgsd-uni"}, {Algorithm::rgsd_multi, "rgsd-multi"}, {Algorithm::rsgd, "rsgd"},
};

std::uint64_t packed_size(std::size_t n) { return n * (n + 1) / 2; }

void step_uni(const ObjectiveSpec& spec, Iterate& it, BasisIndex idx, double beta, double alpha, const Exec& ex) {
  if (beta == 0.0) return;
  const UpdateFactor f = update_factor_uni(it.x.n(), idx, alpha * beta);
  apply_update(it.x, f, ex);
  advance_state(spec, it.st, f, it.x, ex);
}

void step_multi(const ObjectiveSpec& spec, Iterate& it, std::span<const BasisIndex> idx, std::span<const double> betas,
                double alpha, const Exec& ex) {
  const UpdateFactor f = update_factor_multi(DirectionSet(it.x.n(), idx, betas), alpha);
  apply_update(it.x, f, ex);
  advance_state(spec, it.st, f, it.x, ex);
}

// Full step B exp(-t F) B^T from a freshly computed F.
void dense_step(const ObjectiveSpec& spec, CholeskyPoint& x, double t, const Exec& ex) {
  const ObjectiveState st = init_state(spec, x, ex);
  const SymMatrix f = full_F(st, ex);
  x = exp_map_relative(x, f, -t, ex);
}

}  // namespace

std::string_view algorithm_name(Algorithm a) {
  for (const auto& [alg, name] : kNames)
    if (alg == a) return name;
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  std::string key(name);
  for (char& ch : key)
    if (ch == '_') ch = '-';
  for (const auto& [alg, n] : kNames)
    if (n == key) return alg;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

bool is_coordinate(Algorithm a) { return a != Algorithm::rgd && a != Algorithm::rsgd; }

void SolverConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be positive and finite");
  if (!(tol >= 0.0)) throw ConfigError("tol must be non-negative");
  if (check_every == 0) throw ConfigError("check_every must be at least 1");
  if (record_every == 0) throw ConfigError("record_every must be at least 1");
}

std::uint64_t rgd_step(const ObjectiveSpec& spec, CholeskyPoint& x, double alpha, const Exec& ex) {
  dense_step(spec, x, alpha, ex);
  return packed_size(x.n());
}

std::uint64_t rrsd_uni_step(const ObjectiveSpec& spec, Iterate& it, double alpha, Rng& rng, const Exec& ex) {
  const BasisIndex idx = random_basis_index(it.x.n(), rng);
  step_uni(spec, it, idx, beta_coeff(it.st, idx, ex), alpha, ex);
  return 1;
}

std::uint64_t rrsd_multi_step(const ObjectiveSpec& spec, Iterate& it, double alpha, Rng& rng, const Exec& ex) {
  const std::size_t n = it.x.n();
  if (n == 1) return rrsd_uni_step(spec, it, alpha, rng, ex);
  const std::vector<BasisIndex> idx = random_direction_set(n, rng);
  std::vector<double> betas(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) betas[k] = beta_coeff(it.st, idx[k], ex);
  step_multi(spec, it, idx, betas, alpha, ex);
  return idx.size();
}

std::size_t argmax_beta_sq(std::span<const double> packed_F, std::size_t n) {
  if (packed_F.size() != packed_size(n) || packed_F.empty()) throw DimensionMismatch("argmax_beta_sq: table size mismatch");
  std::size_t best = 0;
  double best_v = -1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = packed_F[packed_index(i, j)];
      if (!std::isfinite(v)) throw DomainError("argmax_beta_sq: non-finite table entry");
      const double b2 = (i == j ? 1.0 : 2.0) * v * v;
      if (b2 > best_v) {
        best_v = b2;
        best = packed_index(i, j);
      }
    }
  return best;
}

std::uint64_t rgsd_uni_step(const ObjectiveSpec& spec, Iterate& it, double alpha, const Exec& ex) {
  const std::size_t n = it.x.n();
  const std::vector<double> table = lower_F(it.st, ex);
  const std::size_t k = argmax_beta_sq(table, n);
  ex.charge(table.size());
  const BasisIndex idx = unpack_index(k);
  step_uni(spec, it, idx, beta_from_F(table[k], idx.i, idx.j), alpha, ex);
  return 1;
}

std::uint64_t rgsd_multi_step(const ObjectiveSpec& spec, Iterate& it, double alpha, const Exec& ex) {
  const std::size_t n = it.x.n();
  const std::vector<double> table = lower_F(it.st, ex);
  const std::vector<BasisIndex> idx = greedy_direction_set(n, table);
  ex.charge(greedy_sort_cost(n));
  std::vector<double> betas(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) betas[k] = beta_from_F(table[packed_index(idx[k].i, idx[k].j)], idx[k].i, idx[k].j);
  step_multi(spec, it, idx, betas, alpha, ex);
  return idx.size();
}

std::uint64_t rsgd_step(const ObjectiveSpec& spec, CholeskyPoint& x, double alpha, Rng& rng, const Exec& ex) {
  const std::size_t samples = spec.g->samples();
  if (samples == 0) throw ConfigError("rsgd needs a finite-sum objective");
  const std::size_t s = rng.uniform_index(samples);
  dense_step(spec.sample(s), x, alpha * static_cast<double>(samples), ex);
  return packed_size(x.n());
}

std::string_view status_name(RunStatus s) {
  switch (s) {
    case RunStatus::max_iters: return "max_iters";
    case RunStatus::budget: return "budget";
    case RunStatus::converged: return "converged";
    case RunStatus::diverged: return "diverged";
  }
  return "unknown";
}

RunRecord run(const ObjectiveSpec& spec, const SolverConfig& config, const CholeskyPoint& x0, std::optional<double> f_star) {
  config.validate();
  spec.validate();
  if (config.algo == Algorithm::rsgd && spec.g->samples() == 0) throw ConfigError("rsgd needs a finite-sum objective");

  using Clock = std::chrono::steady_clock;
  FlopLedger ledger;
  const Exec ex{config.backend, &ledger};
  const Exec quiet{config.backend, nullptr};  // bookkeeping that is not part of the method
  Rng rng(config.seed);
  const bool coordinate = is_coordinate(config.algo);
  const std::size_t n = x0.n();

  std::int64_t elapsed = 0;
  Iterate it{x0, {}};
  {
    const auto t0 = Clock::now();
    if (coordinate) it.st = init_state(spec, it.x, ex);
    elapsed += std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
  }
  auto current_value = [&] { return coordinate ? value(spec, it.st) : dense_value(spec, it.x, quiet); };

  RunRecord rec;
  rec.algo = config.algo;
  rec.f_star = f_star;
  rec.f0 = current_value();
  rec.d0 = f_star ? rec.f0 - *f_star : std::max(std::abs(rec.f0), 1.0);
  const double blowup = rec.f0 + 1e3 * std::max(rec.d0, 1e-12 * std::max(1.0, std::abs(rec.f0)));

  std::uint64_t directions = 0;
  auto gap_of = [&](double v) { return f_star ? v - *f_star : std::numeric_limits<double>::quiet_NaN(); };
  auto push_row = [&](std::uint64_t iter, double v) {
    rec.rows.push_back({iter, v, gap_of(v), directions, ledger.f_entries(), ledger.count(), elapsed});
  };
  push_row(0, rec.f0);
  if (f_star && config.tol > 0.0 && rec.f0 - *f_star <= config.tol) rec.status = RunStatus::converged;

  std::uint64_t t = 0;
  double last = rec.f0;
  auto out_of_budget = [&] { return config.max_directions != 0 && directions >= config.max_directions; };
  while (rec.status != RunStatus::converged && t < config.max_iters && !out_of_budget()) {
    ++t;
    double v = 0.0;
    bool stop_converged = false;
    try {
      const auto t0 = Clock::now();
      switch (config.algo) {
        case Algorithm::rgd: directions += rgd_step(spec, it.x, config.alpha, ex); break;
        case Algorithm::rrsd_uni: directions += rrsd_uni_step(spec, it, config.alpha, rng, ex); break;
        case Algorithm::rrsd_multi: directions += rrsd_multi_step(spec, it, config.alpha, rng, ex); break;
        case Algorithm::rgsd_uni: directions += rgsd_uni_step(spec, it, config.alpha, ex); break;
        case Algorithm::rgsd_multi: directions += rgsd_multi_step(spec, it, config.alpha, ex); break;
        case Algorithm::rsgd: directions += rsgd_step(spec, it.x, config.alpha, rng, ex); break;
      }
      if (!f_star && config.tol > 0.0 && t % config.check_every == 0) {
        const std::vector<double> table =
            coordinate ? lower_F(it.st, ex) : lower_F(init_state(spec, it.x, ex), ex);
        ex.charge(table.size());
        stop_converged = grad_norm_sq(table, n) <= config.tol;
      }
      elapsed += std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
      v = current_value();
    } catch (const Overflow& e) {
      rec.status = RunStatus::diverged;
      rec.message = "iteration " + std::to_string(t) + ": " + e.what();
    } catch (const NotPositiveDefinite& e) {
      rec.status = RunStatus::diverged;
      rec.message = "iteration " + std::to_string(t) + ": " + e.what();
    } catch (const NoConvergence& e) {
      rec.status = RunStatus::diverged;
      rec.message = "iteration " + std::to_string(t) + ": " + e.what();
    }
    if (rec.status == RunStatus::diverged) {
      --t;
      break;
    }
    if (!std::isfinite(v) || v > blowup) {
      rec.status = RunStatus::diverged;
      rec.message = "iteration " + std::to_string(t) + ": objective grew to " + std::to_string(v);
      push_row(t, v);
      break;
    }
    if (f_star && config.tol > 0.0 && v - *f_star <= config.tol) stop_converged = true;
    if (stop_converged) rec.status = RunStatus::converged;
    last = v;
    if (stop_converged || t % config.record_every == 0 || t == config.max_iters) push_row(t, v);
  }
  if (rec.status == RunStatus::max_iters && out_of_budget()) {
    rec.status = RunStatus::budget;
    if (rec.rows.back().iter != t) push_row(t, last);
  }
  rec.iterations = t;
  rec.final_point = it.x;
  return rec;
}

}  // namespace spdsd
