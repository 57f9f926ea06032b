#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace spdemove {

/// Parameters of the stochastic advection-diffusion equation
///   du = (theta Laplace u + beta Lambda u) dt + sigma sum_k lambda_k^-gamma h_k dw_k.
/// Individual Fourier modes are allowed to be explosive.
struct ModelParams {
  double theta = 0.5;  // diffusion
  double beta = 10.0;  // advection
  double sigma = 1.0;  // noise amplitude
  double gamma = 0.0;  // spectral decay of the noise

  void validate() const;
};

/// Uniform grid t_n = n * dt, n = 0..n_steps, with n_steps * dt == t_final.
class TimeGrid {
 public:
  TimeGrid(double t_final, double dt);

  double t_final() const noexcept { return t_final_; }
  double dt() const noexcept { return dt_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  std::size_t n_points() const noexcept { return n_steps_ + 1; }
  double time(std::size_t i) const noexcept { return static_cast<double>(i) * dt_; }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double t_final_;
  double dt_;
  std::size_t n_steps_;
};

enum class Scheme { exact, euler };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view s);

/// Stream of standard normal variates. Substreams are keyed by
/// (seed, replication, mode) through a SplitMix64 hash, so every mode of every
/// replication draws from its own generator regardless of scheduling.
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t state_seed);

  static NoiseStream substream(std::uint64_t seed, std::uint64_t replication,
                               std::uint64_t mode);

  double next() { return normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace spdemove
