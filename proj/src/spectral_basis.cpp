#include "spdemove/spectral_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

#include "spdemove/errors.hpp"

namespace spdemove {

namespace {

constexpr double kPi = std::numbers::pi;

struct LatticePoint {
  long long norm2;  // j^2 + k^2
  int j;
  int k;
};

// The N smallest j^2 + k^2 over j, k >= 1, ordered by (norm2, j, k). Searches a
// growing box [1, M]^2; the box is large enough once the N-th value is below
// (M + 1)^2 + 1, the smallest norm any point outside the box can have.
std::vector<LatticePoint> smallest_lattice_points(std::size_t n) {
  int box = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))) + 1;
  for (;;) {
    std::vector<LatticePoint> pts;
    pts.reserve(static_cast<std::size_t>(box) * box);
    for (int j = 1; j <= box; ++j) {
      for (int k = 1; k <= box; ++k) {
        pts.push_back({static_cast<long long>(j) * j + static_cast<long long>(k) * k, j, k});
      }
    }
    const auto less = [](const LatticePoint& a, const LatticePoint& b) {
      return std::tie(a.norm2, a.j, a.k) < std::tie(b.norm2, b.j, b.k);
    };
    if (pts.size() >= n) {
      std::partial_sort(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(n), pts.end(),
                        less);
      const long long bound = static_cast<long long>(box + 1) * (box + 1) + 1;
      if (pts[n - 1].norm2 < bound) {
        pts.resize(n);
        return pts;
      }
    }
    box *= 2;
  }
}

}  // namespace

bool operator==(const Mode& a, const Mode& b) {
  return a.index == b.index && a.multi_index == b.multi_index && a.lambda == b.lambda;
}

SpectralBasis::SpectralBasis(int dimension, std::size_t size) : dimension_(dimension) {
  if (dimension != 1 && dimension != 2) {
    throw ValidationError("basis dimension must be 1 or 2, got " + std::to_string(dimension));
  }
  if (size == 0) {
    throw ValidationError("basis size must be at least 1");
  }
  modes_.reserve(size);
  if (dimension == 1) {
    for (std::size_t k = 1; k <= size; ++k) {
      modes_.push_back({k, {static_cast<int>(k), 0}, static_cast<double>(k) * kPi});
    }
  } else {
    std::size_t idx = 1;
    for (const auto& p : smallest_lattice_points(size)) {
      modes_.push_back({idx++, {p.j, p.k}, kPi * std::sqrt(static_cast<double>(p.norm2))});
    }
  }
}

const Mode& SpectralBasis::mode(std::size_t index) const {
  if (index < 1 || index > modes_.size()) {
    throw ValidationError("mode index " + std::to_string(index) + " outside [1, " +
                          std::to_string(modes_.size()) + "]");
  }
  return modes_[index - 1];
}

std::vector<double> SpectralBasis::lambdas() const {
  std::vector<double> out;
  out.reserve(modes_.size());
  for (const auto& m : modes_) out.push_back(m.lambda);
  return out;
}

SpectralBasis build_basis(int dimension, std::size_t size) { return {dimension, size}; }

double eigenfunction_value(const SpectralBasis& basis, std::size_t mode_index,
                           std::span<const double> xi) {
  const Mode& m = basis.mode(mode_index);
  if (xi.size() != static_cast<std::size_t>(basis.dimension())) {
    throw ValidationError("point has " + std::to_string(xi.size()) +
                          " coordinates, basis dimension is " +
                          std::to_string(basis.dimension()));
  }
  for (double c : xi) {
    if (!(c >= 0.0 && c <= 1.0)) {
      throw ValidationError("point coordinate " + std::to_string(c) + " outside [0, 1]");
    }
  }
  if (basis.dimension() == 1) {
    return std::numbers::sqrt2 * std::sin(m.multi_index[0] * kPi * xi[0]);
  }
  return 2.0 * std::sin(m.multi_index[0] * kPi * xi[0]) * std::sin(m.multi_index[1] * kPi * xi[1]);
}

double eigenfunction_value(const SpectralBasis& basis, std::size_t mode_index, double xi) {
  const double pt[1] = {xi};
  return eigenfunction_value(basis, mode_index, std::span<const double>(pt, 1));
}

double weyl_ratio(const SpectralBasis& basis) {
  const double lam = basis.modes().back().lambda;
  const double n = static_cast<double>(basis.size());
  if (basis.dimension() == 1) {
    const double r = lam / n;
    return r * r;
  }
  return lam * lam / n;
}

double weyl_constant(int dimension) {
  if (dimension == 1) return kPi * kPi;
  if (dimension == 2) return 4.0 * kPi;
  throw ValidationError("dimension must be 1 or 2, got " + std::to_string(dimension));
}

KernelCoefficients kernel_to_coefficients(double mu, double sigma_sq, double tau) {
  if (!(tau > 0.0)) throw ValidationError("kernel time step tau must be positive");
  if (!(sigma_sq > 0.0)) throw ValidationError("kernel variance sigma^2 must be positive");
  return {mu / tau, sigma_sq / (tau * tau), sigma_sq / (2.0 * tau)};
}

}  // namespace spdemove
