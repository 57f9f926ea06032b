#include "spdemove/simulator.hpp"

#include <cmath>
#include <string>

#include "spdemove/errors.hpp"

namespace spdemove {

namespace {

// expm1(x) / x, continuous at 0.
double expm1_ratio(double x) { return x == 0.0 ? 1.0 : std::expm1(x) / x; }

void require_positive_lambda(double lambda) {
  if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
}

void check_value(double u, std::size_t mode_index, std::size_t step, double threshold) {
  if (!std::isfinite(u) || std::abs(u) > threshold) {
    throw PathOverflowError(mode_index, step, u);
  }
}

std::vector<double> basis_values_at(const SpectralBasis& basis, std::span<const double> xi) {
  std::vector<double> h(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) h[k] = eigenfunction_value(basis, k + 1, xi);
  return h;
}

}  // namespace

double drift_coefficient(double lambda, const ModelParams& params) {
  return -params.theta * lambda * lambda + params.beta * lambda;
}

double noise_coefficient(double lambda, const ModelParams& params) {
  require_positive_lambda(lambda);
  return params.gamma == 0.0 ? params.sigma : params.sigma * std::pow(lambda, -params.gamma);
}

double mean_at(double u0, double lambda, const ModelParams& params, double t) {
  if (!(t >= 0.0)) throw ValidationError("time must be nonnegative");
  return u0 * std::exp(drift_coefficient(lambda, params) * t);
}

double second_moment_at(double u0, double lambda, const ModelParams& params, double t) {
  if (!(t >= 0.0)) throw ValidationError("time must be nonnegative");
  const double a = drift_coefficient(lambda, params);
  const double b = noise_coefficient(lambda, params);
  const double x = 2.0 * a * t;
  return u0 * u0 * std::exp(x) + b * b * t * expm1_ratio(x);
}

ModePath simulate_mode_exact(double lambda, const ModelParams& params, double u0,
                             const TimeGrid& grid, NoiseStream& noise, std::size_t mode_index,
                             double overflow_threshold) {
  const double a = drift_coefficient(lambda, params);
  const double b = noise_coefficient(lambda, params);
  const double dt = grid.dt();
  const double decay = std::exp(a * dt);
  // Var of the stochastic convolution over one step: b^2 (e^(2 a dt) - 1) / (2 a).
  const double unit_var = std::abs(a * dt) < 1e-12 ? dt : dt * expm1_ratio(2.0 * a * dt);
  const double sd = b * std::sqrt(unit_var);

  ModePath path{mode_index, lambda, {}};
  path.values.resize(grid.n_points());
  double u = u0;
  check_value(u, mode_index, 0, overflow_threshold);
  path.values[0] = u;
  for (std::size_t n = 1; n <= grid.n_steps(); ++n) {
    u = u * decay + sd * noise.next();
    check_value(u, mode_index, n, overflow_threshold);
    path.values[n] = u;
  }
  return path;
}

ModePath simulate_mode_euler(double lambda, const ModelParams& params, double u0,
                             const TimeGrid& grid, NoiseStream& noise, std::size_t mode_index,
                             double overflow_threshold) {
  const double a = drift_coefficient(lambda, params);
  const double b = noise_coefficient(lambda, params);
  const double dt = grid.dt();
  const double sd = b * std::sqrt(dt);

  ModePath path{mode_index, lambda, {}};
  path.values.resize(grid.n_points());
  double u = u0;
  check_value(u, mode_index, 0, overflow_threshold);
  path.values[0] = u;
  for (std::size_t n = 1; n <= grid.n_steps(); ++n) {
    u = u + a * u * dt + sd * noise.next();
    check_value(u, mode_index, n, overflow_threshold);
    path.values[n] = u;
  }
  return path;
}

ModeEnsemble simulate_ensemble(const SpectralBasis& basis, const ModelParams& params,
                               std::span<const double> initial_coefficients,
                               const TimeGrid& grid, std::uint64_t seed, Scheme scheme,
                               const SimulationOptions& options) {
  params.validate();
  if (initial_coefficients.size() != basis.size()) {
    throw ValidationError("expected " + std::to_string(basis.size()) +
                          " initial coefficients, got " +
                          std::to_string(initial_coefficients.size()));
  }
  if (!(options.overflow_threshold > 0.0)) {
    throw ValidationError("overflow threshold must be positive");
  }
  ModeEnsemble ens{basis, params, grid, {}, seed, options.replication, scheme};
  ens.paths.reserve(basis.size());
  for (const Mode& m : basis.modes()) {
    NoiseStream noise = NoiseStream::substream(seed, options.replication, m.index);
    const double u0 = initial_coefficients[m.index - 1];
    if (scheme == Scheme::exact) {
      ens.paths.push_back(simulate_mode_exact(m.lambda, params, u0, grid, noise, m.index,
                                              options.overflow_threshold));
    } else {
      ens.paths.push_back(simulate_mode_euler(m.lambda, params, u0, grid, noise, m.index,
                                              options.overflow_threshold));
    }
  }
  return ens;
}

std::vector<double> dirac_initial_coefficients(const SpectralBasis& basis,
                                               std::span<const double> xi0) {
  return basis_values_at(basis, xi0);
}

std::vector<double> dirac_initial_coefficients(const SpectralBasis& basis, double xi0) {
  const double pt[1] = {xi0};
  return dirac_initial_coefficients(basis, std::span<const double>(pt, 1));
}

double evaluate_field(const ModeEnsemble& ensemble, std::size_t t_index,
                      std::span<const double> xi) {
  if (t_index >= ensemble.grid.n_points()) {
    throw ValidationError("time index " + std::to_string(t_index) + " outside the grid");
  }
  const auto h = basis_values_at(ensemble.basis, xi);
  double sum = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) sum += ensemble.paths[k].values[t_index] * h[k];
  return sum;
}

double evaluate_field(const ModeEnsemble& ensemble, std::size_t t_index, double xi) {
  const double pt[1] = {xi};
  return evaluate_field(ensemble, t_index, std::span<const double>(pt, 1));
}

std::vector<double> trajectory_at(const ModeEnsemble& ensemble, std::span<const double> xi) {
  const auto h = basis_values_at(ensemble.basis, xi);
  std::vector<double> out(ensemble.grid.n_points(), 0.0);
  for (std::size_t k = 0; k < h.size(); ++k) {
    const auto& v = ensemble.paths[k].values;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i] * h[k];
  }
  return out;
}

std::vector<double> trajectory_at(const ModeEnsemble& ensemble, double xi) {
  const double pt[1] = {xi};
  return trajectory_at(ensemble, std::span<const double>(pt, 1));
}

double parseval_norm(const ModeEnsemble& ensemble, std::size_t t_index) {
  if (t_index >= ensemble.grid.n_points()) {
    throw ValidationError("time index " + std::to_string(t_index) + " outside the grid");
  }
  double sum = 0.0;
  for (const auto& p : ensemble.paths) sum += p.values[t_index] * p.values[t_index];
  return sum;
}

}  // namespace spdemove
