#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spdemove/errors.hpp"
#include "spdemove/inference.hpp"
#include "spdemove/model.hpp"
#include "spdemove/simulator.hpp"

namespace spdemove {

/// A Monte Carlo study: R independent ensembles simulated under `params0`.
/// Replication r of seed s draws mode k from substream (s, r, k).
struct StudyConfig {
  ModelParams params0;
  int dimension = 1;
  std::size_t n_modes = 50;
  double t_final = 1.0;
  double dt = 0.001;
  std::size_t reps = 1000;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::exact;
  std::size_t workers = 1;
  double overflow_threshold = kDefaultOverflowThreshold;
  double singularity_eps = kDefaultSingularityEps;
  /// Point-mass initial condition; zero initial condition when empty.
  std::optional<std::vector<double>> xi0;

  void validate() const;
  SpectralBasis basis() const;
  TimeGrid grid() const;
  std::vector<double> initial_coefficients(const SpectralBasis& basis) const;
};

/// A replication failed numerically; carries the replication id and a short
/// status tag ("overflow", "singular", "degenerate").
class ReplicationError : public NumericalError {
 public:
  ReplicationError(std::size_t rep_id, std::string status, const std::string& what);

  std::size_t rep_id() const noexcept { return rep_id_; }
  const std::string& status() const noexcept { return status_; }

 private:
  std::size_t rep_id_;
  std::string status_;
};

/// Simulate, reduce, and estimate one replication. Deterministic in (config, rep_id).
EstimateResult run_replication(const StudyConfig& config, std::size_t rep_id);

struct ReplicationOutcome {
  std::size_t rep_id = 0;
  std::string status;  // "ok" or a ReplicationError status
  std::optional<EstimateResult> result;
  std::string message;
};

struct ParameterSummary {
  double mean;
  double quantile_low;   // 2.5%
  double quantile_high;  // 97.5%
};

struct McSummary {
  StudyConfig config;
  std::vector<ReplicationOutcome> outcomes;  // indexed by rep_id
  std::size_t n_ok = 0;
  std::size_t n_failed = 0;
  ParameterSummary theta;
  ParameterSummary beta;
  double wall_seconds = 0.0;

  std::vector<double> theta_estimates() const;
  std::vector<double> beta_estimates() const;
};

/// Empirical quantile with linear interpolation between order statistics
/// (position p * (n - 1) in the sorted sample).
double empirical_quantile(std::span<const double> sample, double p);
double median(std::span<const double> sample);

/// Runs all replications on `config.workers` threads. Failed replications are
/// recorded in `outcomes` and excluded from the summaries.
McSummary mc_study(const StudyConfig& config);

enum class SweepAxis { t_final, n_modes };

SweepAxis parse_sweep_axis(const std::string& s);
std::string to_string(SweepAxis axis);

struct SweepPoint {
  double value;
  double median_abs_err_theta;
  double median_abs_err_beta;
  double median_abs_j1;
  std::size_t n_ok;
  std::size_t n_failed;
};

/// One mc_study per sweep value, sharing the seed (common random numbers).
/// `values` must be positive and sorted ascending.
std::vector<SweepPoint> consistency_sweep(const StudyConfig& config, SweepAxis axis,
                                          std::span<const double> values);

struct TrajectoryBundle {
  std::vector<double> times;
  std::vector<double> xi;
  std::vector<std::vector<double>> series;  // series[i] is the trajectory at xi[i]
};

/// Simulates one ensemble (replication 0) and evaluates the field at each xi
/// (d = 1) over the whole grid.
TrajectoryBundle trajectory_bundle(const StudyConfig& config, std::span<const double> xi_list);

}  // namespace spdemove
