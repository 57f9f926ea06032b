#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spdemove/model.hpp"
#include "spdemove/spectral_basis.hpp"

namespace spdemove {

// Each Galerkin mode u_k is an Ornstein-Uhlenbeck process
//   du_k = a_k u_k dt + b_k dw_k,  a_k = -theta lambda_k^2 + beta lambda_k,
//                                  b_k = sigma lambda_k^-gamma.

double drift_coefficient(double lambda, const ModelParams& params);
double noise_coefficient(double lambda, const ModelParams& params);

/// E[u_k(t)] = u0 exp(a_k t).
double mean_at(double u0, double lambda, const ModelParams& params, double t);

/// E[u_k(t)^2] = u0^2 e^(2 a t) + b^2 (e^(2 a t) - 1) / (2 a), with the
/// Brownian limit u0^2 + b^2 t when a = 0.
double second_moment_at(double u0, double lambda, const ModelParams& params, double t);

inline constexpr double kDefaultOverflowThreshold = 1e100;

struct ModePath {
  std::size_t mode_index = 0;
  double lambda = 0.0;
  std::vector<double> values;  // u_k(t_n), n = 0..n_steps
};

/// Exact OU transition: u_{n+1} = u_n e^(a dt) + sd * Z.
/// Throws PathOverflowError once |u| exceeds `overflow_threshold`.
ModePath simulate_mode_exact(double lambda, const ModelParams& params, double u0,
                             const TimeGrid& grid, NoiseStream& noise,
                             std::size_t mode_index = 1,
                             double overflow_threshold = kDefaultOverflowThreshold);

/// Euler-Maruyama: u_{n+1} = u_n + a u_n dt + b sqrt(dt) Z. The noise is additive,
/// so this is also the Milstein scheme.
ModePath simulate_mode_euler(double lambda, const ModelParams& params, double u0,
                             const TimeGrid& grid, NoiseStream& noise,
                             std::size_t mode_index = 1,
                             double overflow_threshold = kDefaultOverflowThreshold);

struct ModeEnsemble {
  SpectralBasis basis;
  ModelParams params;
  TimeGrid grid;
  std::vector<ModePath> paths;  // one per basis mode, in basis order
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;
  Scheme scheme = Scheme::exact;
};

struct SimulationOptions {
  std::uint64_t replication = 0;
  double overflow_threshold = kDefaultOverflowThreshold;
};

/// Simulates every mode of `basis` with its own noise substream
/// (seed, options.replication, mode index).
ModeEnsemble simulate_ensemble(const SpectralBasis& basis, const ModelParams& params,
                               std::span<const double> initial_coefficients,
                               const TimeGrid& grid, std::uint64_t seed,
                               Scheme scheme = Scheme::exact,
                               const SimulationOptions& options = {});

/// u_k(0) = h_k(xi0): spectral coefficients of a point mass at xi0.
std::vector<double> dirac_initial_coefficients(const SpectralBasis& basis,
                                               std::span<const double> xi0);
std::vector<double> dirac_initial_coefficients(const SpectralBasis& basis, double xi0);

/// u^N(t_i, xi) = sum_k u_k(t_i) h_k(xi).
double evaluate_field(const ModeEnsemble& ensemble, std::size_t t_index,
                      std::span<const double> xi);
double evaluate_field(const ModeEnsemble& ensemble, std::size_t t_index, double xi);

/// evaluate_field at every grid time.
std::vector<double> trajectory_at(const ModeEnsemble& ensemble, std::span<const double> xi);
std::vector<double> trajectory_at(const ModeEnsemble& ensemble, double xi);

/// sum_k u_k(t_i)^2, the squared L2 norm of the reconstructed field.
double parseval_norm(const ModeEnsemble& ensemble, std::size_t t_index);

}  // namespace spdemove
