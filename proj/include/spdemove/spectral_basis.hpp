#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace spdemove {

/// One eigenpair of the Dirichlet Laplacian on the unit interval or square.
/// `lambda` is the square root of the (positive) eigenvalue of -Laplace, so the
/// eigenvalue itself is lambda^2.
struct Mode {
  std::size_t index;                  // 1-based position in the sorted basis
  std::array<int, 2> multi_index;     // (k, 0) for d=1, (j, k) for d=2
  double lambda;
};

/// The N eigenfunctions of -Laplace with the smallest eigenvalues, sorted by
/// lambda (ties in d=2 broken lexicographically on (j, k)).
///
/// d=1: h_k(x) = sqrt(2) sin(k pi x), lambda_k = k pi.
/// d=2: h_(j,k)(x, y) = 2 sin(j pi x) sin(k pi y), lambda = pi sqrt(j^2 + k^2).
class SpectralBasis {
 public:
  SpectralBasis(int dimension, std::size_t size);

  int dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return modes_.size(); }
  const std::vector<Mode>& modes() const noexcept { return modes_; }
  const Mode& mode(std::size_t index) const;  // 1-based

  std::vector<double> lambdas() const;

  friend bool operator==(const SpectralBasis&, const SpectralBasis&) = default;

 private:
  int dimension_;
  std::vector<Mode> modes_;
};

bool operator==(const Mode& a, const Mode& b);

SpectralBasis build_basis(int dimension, std::size_t size);

/// h_k(xi) for the 1-based mode index. `xi` must have `dimension()` coordinates,
/// each in [0, 1].
double eigenfunction_value(const SpectralBasis& basis, std::size_t mode_index,
                           std::span<const double> xi);
double eigenfunction_value(const SpectralBasis& basis, std::size_t mode_index, double xi);

/// lambda_N^2 * N^(-2/d): finite-N approximant of the Weyl constant
/// (pi^2 for the interval, 4 pi for the unit square).
double weyl_ratio(const SpectralBasis& basis);

/// Limit of weyl_ratio as N grows.
double weyl_constant(int dimension);

/// Coefficients of the advection-diffusion PDE induced by a Gaussian movement
/// kernel with mean displacement mu and variance sigma_sq over a step tau.
struct KernelCoefficients {
  double advection;           // F = mu / tau
  double diffusion_variance;  // G = sigma^2 / tau^2
  double pde_diffusion;       // sigma^2 / (2 tau) = G tau / 2
};

KernelCoefficients kernel_to_coefficients(double mu, double sigma_sq, double tau);

}  // namespace spdemove
