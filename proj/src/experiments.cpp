#include "spdemove/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace spdemove {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ParameterSummary summarize(std::span<const double> xs) {
  if (xs.empty()) return {kNaN, kNaN, kNaN};
  double sum = 0.0;
  for (double x : xs) sum += x;
  return {sum / static_cast<double>(xs.size()), empirical_quantile(xs, 0.025),
          empirical_quantile(xs, 0.975)};
}

ReplicationOutcome run_outcome(const StudyConfig& config, std::size_t rep_id) {
  ReplicationOutcome out;
  out.rep_id = rep_id;
  try {
    out.result = run_replication(config, rep_id);
    out.status = "ok";
  } catch (const ReplicationError& e) {
    out.status = e.status();
    out.message = e.what();
  }
  return out;
}

}  // namespace

void StudyConfig::validate() const {
  params0.validate();
  std::ostringstream bad;
  if (dimension != 1 && dimension != 2) bad << " dimension must be 1 or 2;";
  if (n_modes == 0) bad << " n_modes must be positive;";
  if (reps == 0) bad << " reps must be positive;";
  if (workers == 0) bad << " workers must be positive;";
  if (!(overflow_threshold > 0.0)) bad << " overflow_threshold must be positive;";
  if (!(singularity_eps >= 0.0)) bad << " singularity_eps must be nonnegative;";
  if (xi0 && xi0->size() != static_cast<std::size_t>(dimension)) {
    bad << " xi0 must have one coordinate per dimension;";
  }
  if (xi0) {
    for (double c : *xi0) {
      if (!(c >= 0.0 && c <= 1.0)) bad << " xi0 coordinates must lie in [0, 1];";
    }
  }
  if (!bad.str().empty()) throw ValidationError("invalid study config:" + bad.str());
  (void)grid();
}

SpectralBasis StudyConfig::basis() const { return build_basis(dimension, n_modes); }

TimeGrid StudyConfig::grid() const { return {t_final, dt}; }

std::vector<double> StudyConfig::initial_coefficients(const SpectralBasis& b) const {
  if (!xi0) return std::vector<double>(b.size(), 0.0);
  return dirac_initial_coefficients(b, *xi0);
}

ReplicationError::ReplicationError(std::size_t rep_id, std::string status,
                                   const std::string& what)
    : NumericalError("replication " + std::to_string(rep_id) + ": " + what),
      rep_id_(rep_id),
      status_(std::move(status)) {}

EstimateResult run_replication(const StudyConfig& config, std::size_t rep_id) {
  const SpectralBasis basis = config.basis();
  const TimeGrid grid = config.grid();
  const auto ic = config.initial_coefficients(basis);
  try {
    const ModeEnsemble ens =
        simulate_ensemble(basis, config.params0, ic, grid, config.seed, config.scheme,
                          {rep_id, config.overflow_threshold});
    return estimate(sufficient_statistics(ens), config.singularity_eps);
  } catch (const PathOverflowError& e) {
    throw ReplicationError(rep_id, "overflow", e.what());
  } catch (const SingularityError& e) {
    throw ReplicationError(rep_id, "singular", e.what());
  } catch (const DegenerateDataError& e) {
    throw ReplicationError(rep_id, "degenerate", e.what());
  }
}

double empirical_quantile(std::span<const double> sample, double p) {
  if (sample.empty()) return kNaN;
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("quantile level must lie in [0, 1]");
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  const double h = p * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

double median(std::span<const double> sample) { return empirical_quantile(sample, 0.5); }

std::vector<double> McSummary::theta_estimates() const {
  std::vector<double> v;
  for (const auto& o : outcomes) {
    if (o.result) v.push_back(o.result->theta_hat);
  }
  return v;
}

std::vector<double> McSummary::beta_estimates() const {
  std::vector<double> v;
  for (const auto& o : outcomes) {
    if (o.result) v.push_back(o.result->beta_hat);
  }
  return v;
}

McSummary mc_study(const StudyConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  McSummary summary;
  summary.config = config;
  summary.outcomes.resize(config.reps);

  const std::size_t n_workers = std::min(config.workers, config.reps);
  if (n_workers <= 1) {
    for (std::size_t r = 0; r < config.reps; ++r) summary.outcomes[r] = run_outcome(config, r);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t r = next++; r < config.reps && !failed; r = next++) {
          try {
            summary.outcomes[r] = run_outcome(config, r);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  for (const auto& o : summary.outcomes) {
    if (o.result) {
      ++summary.n_ok;
    } else {
      ++summary.n_failed;
    }
  }
  const auto th = summary.theta_estimates();
  const auto be = summary.beta_estimates();
  summary.theta = summarize(th);
  summary.beta = summarize(be);
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return summary;
}

SweepAxis parse_sweep_axis(const std::string& s) {
  if (s == "T" || s == "t" || s == "t-final" || s == "t_final") return SweepAxis::t_final;
  if (s == "N" || s == "n" || s == "n-modes" || s == "n_modes") return SweepAxis::n_modes;
  throw ValidationError("unknown sweep axis '" + s + "' (expected T or N)");
}

std::string to_string(SweepAxis axis) { return axis == SweepAxis::t_final ? "T" : "N"; }

std::vector<SweepPoint> consistency_sweep(const StudyConfig& config, SweepAxis axis,
                                          std::span<const double> values) {
  if (values.empty()) throw ValidationError("sweep needs at least one value");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) throw ValidationError("sweep values must be positive");
    if (i > 0 && !(values[i] > values[i - 1])) {
      throw ValidationError("sweep values must be sorted ascending");
    }
    if (axis == SweepAxis::n_modes && values[i] != std::floor(values[i])) {
      throw ValidationError("N sweep values must be integers");
    }
  }
  std::vector<SweepPoint> curve;
  curve.reserve(values.size());
  for (double v : values) {
    StudyConfig c = config;
    if (axis == SweepAxis::t_final) {
      c.t_final = v;
    } else {
      c.n_modes = static_cast<std::size_t>(v);
    }
    const McSummary s = mc_study(c);
    std::vector<double> et, eb, j1;
    for (const auto& o : s.outcomes) {
      if (!o.result) continue;
      et.push_back(std::abs(o.result->theta_hat - c.params0.theta));
      eb.push_back(std::abs(o.result->beta_hat - c.params0.beta));
      j1.push_back(std::abs(o.result->j1));
    }
    curve.push_back({v, median(et), median(eb), median(j1), s.n_ok, s.n_failed});
  }
  return curve;
}

TrajectoryBundle trajectory_bundle(const StudyConfig& config, std::span<const double> xi_list) {
  config.validate();
  if (config.dimension != 1) {
    throw ValidationError("trajectory bundles take scalar xi; use dimension 1");
  }
  for (double x : xi_list) {
    if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("xi values must lie in [0, 1]");
  }
  const SpectralBasis basis = config.basis();
  const TimeGrid grid = config.grid();
  const ModeEnsemble ens =
      simulate_ensemble(basis, config.params0, config.initial_coefficients(basis), grid,
                        config.seed, config.scheme, {0, config.overflow_threshold});
  TrajectoryBundle bundle;
  bundle.times.reserve(grid.n_points());
  for (std::size_t i = 0; i < grid.n_points(); ++i) bundle.times.push_back(grid.time(i));
  bundle.xi.assign(xi_list.begin(), xi_list.end());
  for (double x : xi_list) bundle.series.push_back(trajectory_at(ens, x));
  return bundle;
}

}  // namespace spdemove
