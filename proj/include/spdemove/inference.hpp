#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spdemove/model.hpp"
#include "spdemove/simulator.hpp"
#include "spdemove/spectral_basis.hpp"

namespace spdemove {

/// Left-point Ito sum  sum_i u_i (u_{i+1} - u_i), the discretization of
/// int u du. Equals (u_T^2 - u_0^2 - sum (du_i)^2) / 2 exactly in real arithmetic.
double ito_sum(std::span<const double> values);

/// Left Riemann sum  sum_{i<n} u_i^2 dt, the discretization of int u^2 dt.
double energy_quadrature(std::span<const double> values, double dt);

/// Path functionals from which the joint MLE of (theta, beta) is a 2x2 solve:
///   I1 = sum lambda^(4+2g) E_k   I2 = sum lambda^(2+2g) E_k   I3 = sum lambda^(3+2g) E_k
///   I4 = sum lambda^(2+2g) S_k   I5 = sum lambda^(1+2g) S_k
/// with E_k = int u_k^2 dt and S_k = int u_k du_k.
struct SufficientStats {
  double i1 = 0.0;
  double i2 = 0.0;
  double i3 = 0.0;
  double i4 = 0.0;
  double i5 = 0.0;
  double gamma = 0.0;
  double sigma = 1.0;
  std::vector<double> per_mode_energy;
  std::vector<double> per_mode_ito;
};

SufficientStats sufficient_statistics(const ModeEnsemble& ensemble);

/// Same reduction on raw paths (e.g. read back from disk). Summation runs in
/// the order of `paths`.
SufficientStats sufficient_statistics(std::span<const ModePath> paths, double dt, double gamma,
                                      double sigma);

inline constexpr double kDefaultSingularityEps = 1e-12;

struct EstimateResult {
  double theta_hat = 0.0;
  double beta_hat = 0.0;
  double j1 = 0.0;
  double j2 = 0.0;
  double det_factor = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double fisher_theta = 0.0;  // observed information I1 / sigma^2
};

/// Closed-form MLE
///   theta = (I3 I5 - I2 I4) / (I1 I2 - I3^2),  beta = (I1 I5 - I3 I4) / (I1 I2 - I3^2).
/// Throws SingularityError unless I1 I2 - I3^2 > eps * I1 I2.
EstimateResult estimate(const SufficientStats& stats, double eps = kDefaultSingularityEps);

struct Residuals {
  double r1;
  double r2;
};

/// r1 = theta I1 - beta I3 + I4,  r2 = -theta I3 + beta I2 - I5.
Residuals normal_equation_residuals(const SufficientStats& stats, double theta_hat,
                                    double beta_hat);
Residuals normal_equation_residuals(const SufficientStats& stats, const EstimateResult& result);

struct ProofDiagnostics {
  double j1;          // -I3 / I1
  double j2;          // -I3 / I2
  double det_factor;  // 1 - J1 J2 = 1 - I3^2 / (I1 I2)
};

ProofDiagnostics proof_diagnostics(const SufficientStats& stats);

/// E[int_0^T u_k^2 dt] for a zero initial condition under `params0`.
double expected_mode_energy(double lambda, const ModelParams& params0, double t_final);

struct FisherInformation {
  double exact;       // (1/sigma^2) sum lambda^(4+2 gamma) E[int u_k^2 dt]
  double asymptotic;  // weyl d T N^(2/d+1) / ((4 + 2d) theta0)
};

FisherInformation fisher_information_theta(const SpectralBasis& basis,
                                           const ModelParams& params0, double t_final);

}  // namespace spdemove
