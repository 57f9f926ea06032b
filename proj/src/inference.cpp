#include "spdemove/inference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spdemove/errors.hpp"

namespace spdemove {

namespace {

double lambda_pow(double lambda, double exponent) {
  // Integer exponents (gamma = 0) are computed by multiplication so that the
  // statistics are exactly reproducible across libm implementations.
  if (exponent == std::floor(exponent) && exponent >= 0.0 && exponent <= 8.0) {
    double r = 1.0;
    for (int i = 0; i < static_cast<int>(exponent); ++i) r *= lambda;
    return r;
  }
  return std::pow(lambda, exponent);
}

// a*b - c*d to within about one ulp (Kahan).
double diff_of_products(double a, double b, double c, double d) {
  const double w = c * d;
  const double e = std::fma(-c, d, w);
  const double f = std::fma(a, b, -w);
  return f + e;
}

// (e^x - 1 - x) / x^2, continuous at 0.
double energy_kernel(double x) {
  if (std::abs(x) < 1e-3) {
    return 0.5 + x * (1.0 / 6.0 + x * (1.0 / 24.0 + x / 120.0));
  }
  return (std::expm1(x) - x) / (x * x);
}

}  // namespace

double ito_sum(std::span<const double> values) {
  if (values.size() < 2) throw ValidationError("ito_sum needs at least two path values");
  long double s = 0.0L;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    s += static_cast<long double>(values[i]) * (static_cast<long double>(values[i + 1]) - values[i]);
  }
  return static_cast<double>(s);
}

double energy_quadrature(std::span<const double> values, double dt) {
  if (values.size() < 2) throw ValidationError("energy_quadrature needs at least two values");
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  long double s = 0.0L;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    s += static_cast<long double>(values[i]) * values[i];
  }
  return static_cast<double>(s * dt);
}

SufficientStats sufficient_statistics(std::span<const ModePath> paths, double dt, double gamma,
                                      double sigma) {
  if (paths.empty()) throw ValidationError("sufficient statistics need at least one path");
  if (!(gamma >= 0.0)) throw ValidationError("gamma must be nonnegative");
  if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");

  SufficientStats st;
  st.gamma = gamma;
  st.sigma = sigma;
  st.per_mode_energy.reserve(paths.size());
  st.per_mode_ito.reserve(paths.size());
  bool any_nonzero = false;
  long double i1 = 0.0L, i2 = 0.0L, i3 = 0.0L, i4 = 0.0L, i5 = 0.0L;
  for (const ModePath& p : paths) {
    if (!(p.lambda > 0.0)) throw ValidationError("path lambda must be positive");
    for (std::size_t i = 0; i < p.values.size(); ++i) {
      if (!std::isfinite(p.values[i])) throw PathOverflowError(p.mode_index, i, p.values[i]);
    }
    const double energy = energy_quadrature(p.values, dt);
    const double ito = ito_sum(p.values);
    any_nonzero = any_nonzero || energy > 0.0;
    st.per_mode_energy.push_back(energy);
    st.per_mode_ito.push_back(ito);

    const double g2 = 2.0 * gamma;
    const long double e = energy, it = ito;
    i1 += lambda_pow(p.lambda, 4.0 + g2) * e;
    i2 += lambda_pow(p.lambda, 2.0 + g2) * e;
    i3 += lambda_pow(p.lambda, 3.0 + g2) * e;
    i4 += lambda_pow(p.lambda, 2.0 + g2) * it;
    i5 += lambda_pow(p.lambda, 1.0 + g2) * it;
  }
  st.i1 = static_cast<double>(i1);
  st.i2 = static_cast<double>(i2);
  st.i3 = static_cast<double>(i3);
  st.i4 = static_cast<double>(i4);
  st.i5 = static_cast<double>(i5);
  if (!any_nonzero) {
    throw DegenerateDataError("every path is identically zero on [0, T); nothing to estimate");
  }
  return st;
}

SufficientStats sufficient_statistics(const ModeEnsemble& ensemble) {
  return sufficient_statistics(ensemble.paths, ensemble.grid.dt(), ensemble.params.gamma,
                               ensemble.params.sigma);
}

Residuals normal_equation_residuals(const SufficientStats& s, double theta_hat,
                                    double beta_hat) {
  const long double t = theta_hat, b = beta_hat;
  return {static_cast<double>(t * s.i1 - b * s.i3 + s.i4),
          static_cast<double>(-t * s.i3 + b * s.i2 - s.i5)};
}

Residuals normal_equation_residuals(const SufficientStats& stats, const EstimateResult& result) {
  return normal_equation_residuals(stats, result.theta_hat, result.beta_hat);
}

ProofDiagnostics proof_diagnostics(const SufficientStats& s) {
  if (!(s.i1 > 0.0) || !(s.i2 > 0.0)) {
    throw DegenerateDataError("I1 and I2 must be positive for the J1/J2 diagnostics");
  }
  const double j1 = -s.i3 / s.i1;
  const double j2 = -s.i3 / s.i2;
  return {j1, j2, diff_of_products(s.i1, s.i2, s.i3, s.i3) / (s.i1 * s.i2)};
}

EstimateResult estimate(const SufficientStats& s, double eps) {
  if (!(eps >= 0.0)) throw ValidationError("singularity eps must be nonnegative");
  if (!(s.i1 > 0.0) || !(s.i2 > 0.0)) {
    throw DegenerateDataError("I1 and I2 must be positive; the data carry no information");
  }
  const double scale = s.i1 * s.i2;
  const double det = diff_of_products(s.i1, s.i2, s.i3, s.i3);
  if (!(det > eps * scale)) throw SingularityError(det, scale);

  EstimateResult r;
  r.theta_hat = diff_of_products(s.i3, s.i5, s.i2, s.i4) / det;
  r.beta_hat = diff_of_products(s.i1, s.i5, s.i3, s.i4) / det;
  const auto diag = proof_diagnostics(s);
  r.j1 = diag.j1;
  r.j2 = diag.j2;
  r.det_factor = diag.det_factor;
  const auto res = normal_equation_residuals(s, r.theta_hat, r.beta_hat);
  r.r1 = res.r1;
  r.r2 = res.r2;
  r.fisher_theta = s.i1 / (s.sigma * s.sigma);
  return r;
}

double expected_mode_energy(double lambda, const ModelParams& params0, double t_final) {
  if (!(t_final >= 0.0)) throw ValidationError("T must be nonnegative");
  const double a = drift_coefficient(lambda, params0);
  const double b = noise_coefficient(lambda, params0);
  // b^2/(2a) [ (e^(2aT) - 1)/(2a) - T ]  =  b^2 T^2 (e^x - 1 - x)/x^2,  x = 2aT.
  return b * b * t_final * t_final * energy_kernel(2.0 * a * t_final);
}

FisherInformation fisher_information_theta(const SpectralBasis& basis,
                                           const ModelParams& params0, double t_final) {
  params0.validate();
  if (!(t_final > 0.0)) throw ValidationError("T must be positive");
  double exact = 0.0;
  for (const Mode& m : basis.modes()) {
    exact += lambda_pow(m.lambda, 4.0 + 2.0 * params0.gamma) *
             expected_mode_energy(m.lambda, params0, t_final);
  }
  exact /= params0.sigma * params0.sigma;
  const int d = basis.dimension();
  const double n = static_cast<double>(basis.size());
  const double asymptotic = weyl_constant(d) * d * t_final * std::pow(n, 2.0 / d + 1.0) /
                            ((4.0 + 2.0 * d) * params0.theta);
  return {exact, asymptotic};
}

}  // namespace spdemove
