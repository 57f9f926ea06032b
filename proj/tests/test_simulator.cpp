#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "spdemove/errors.hpp"
#include "spdemove/simulator.hpp"

using namespace spdemove;

namespace {

constexpr double kPi = std::numbers::pi;
const ModelParams kRef{0.5, 10.0, 1.0, 0.0};  // modes 1 to 6 are explosive

ModeEnsemble constant_ensemble(std::size_t n_modes, std::vector<double> level) {
  const auto basis = build_basis(1, n_modes);
  ModeEnsemble e{basis, kRef, TimeGrid(1.0, 0.25), {}, 0, 0, Scheme::exact};
  for (const auto& m : basis.modes()) {
    e.paths.push_back({m.index, m.lambda, std::vector<double>(5, level[m.index - 1])});
  }
  return e;
}

}  // namespace

TEST(Coefficients, Drift) {
  // Values from an independent 30-digit evaluation of -theta lambda^2 + beta lambda.
  EXPECT_NEAR(drift_coefficient(kPi, kRef), 26.481124335353253, 1e-12);
  EXPECT_NEAR(drift_coefficient(7 * kPi, kRef), -21.893822075403759, 1e-12);
  EXPECT_EQ(drift_coefficient(20.0, kRef), 0.0);  // lambda = beta / theta
}

TEST(Coefficients, Noise) {
  EXPECT_EQ(noise_coefficient(2 * kPi, {0.5, 10, 1, 0}), 1.0);
  EXPECT_EQ(noise_coefficient(kPi, {2, 1, 10, 0}), 10.0);
  EXPECT_DOUBLE_EQ(noise_coefficient(4.0, {1, 1, 2, 1}), 0.5);
  EXPECT_THROW(noise_coefficient(0.0, kRef), ValidationError);
}

TEST(Moments, Mean) {
  EXPECT_EQ(mean_at(0.0, 7 * kPi, kRef, 1.0), 0.0);
  EXPECT_EQ(mean_at(1.0, 20.0, kRef, 5.0), 1.0);
  EXPECT_NEAR(mean_at(1.0, 7 * kPi, kRef, 0.1), 0.11198591130262327, 1e-14);
  EXPECT_THROW(mean_at(1.0, kPi, kRef, -1.0), ValidationError);
}

TEST(Moments, SecondMoment) {
  EXPECT_EQ(second_moment_at(0.0, 7 * kPi, kRef, 0.0), 0.0);
  EXPECT_NEAR(second_moment_at(0.0, 7 * kPi, kRef, 100.0), 0.022837492616774138, 1e-15);
  // a = 0 (lambda = 20), b = 1: Brownian variance t.
  EXPECT_DOUBLE_EQ(second_moment_at(0.0, 20.0, kRef, 2.0), 2.0);
  EXPECT_DOUBLE_EQ(second_moment_at(3.0, 20.0, kRef, 2.0), 11.0);
  // Continuity across a = 0.
  const double near0 = second_moment_at(0.5, 20.0 + 1e-9, kRef, 2.0);
  EXPECT_NEAR(near0, 2.25, 1e-6);
}

TEST(SimulateExact, DeterministicWithoutNoise) {
  ModelParams p = kRef;
  p.sigma = 0.0;
  NoiseStream noise(1);
  const auto path = simulate_mode_exact(20.0, p, 1.0, TimeGrid(1.0, 0.01), noise);
  ASSERT_EQ(path.values.size(), 101u);
  for (double v : path.values) EXPECT_EQ(v, 1.0);

  const auto decay = simulate_mode_exact(7 * kPi, p, 1.0, TimeGrid(1.0, 0.01), noise);
  for (std::size_t i = 0; i < decay.values.size(); i += 10) {
    EXPECT_NEAR(decay.values[i], mean_at(1.0, 7 * kPi, p, 0.01 * i), 1e-14);
  }
}

TEST(SimulateExact, MarginalMomentsMatchClosedForm) {
  const double lam = 7 * kPi;
  const TimeGrid grid(0.2, 0.01);
  std::vector<double> finals, squares;
  for (std::uint64_t r = 0; r < 10000; ++r) {
    auto noise = NoiseStream::substream(11, r, 7);
    const auto path = simulate_mode_exact(lam, kRef, 0.3, grid, noise, 7);
    finals.push_back(path.values.back());
    squares.push_back(path.values.back() * path.values.back());
  }
  const auto m1 = oracle::sample_moments(finals);
  const auto m2 = oracle::sample_moments(squares);
  EXPECT_NEAR(m1.mean, mean_at(0.3, lam, kRef, 0.2), 4 * m1.std_error);
  EXPECT_NEAR(m2.mean, second_moment_at(0.3, lam, kRef, 0.2), 4 * m2.std_error);
}

TEST(SimulateExact, BrownianLimitIncrements) {
  const TimeGrid grid(10.0, 0.01);
  NoiseStream noise(5);
  const auto path = simulate_mode_exact(20.0, kRef, 0.0, grid, noise);
  std::vector<double> inc;
  for (std::size_t i = 0; i + 1 < path.values.size(); ++i) {
    inc.push_back(path.values[i + 1] - path.values[i]);
  }
  const auto m = oracle::sample_moments(inc);
  EXPECT_NEAR(m.mean, 0.0, 4 * m.std_error);
  std::vector<double> sq;
  for (double d : inc) sq.push_back(d * d);
  const auto v = oracle::sample_moments(sq);
  EXPECT_NEAR(v.mean, 0.01, 4 * v.std_error);
  // Lag-one correlation of increments is negligible.
  double c = 0.0;
  for (std::size_t i = 0; i + 1 < inc.size(); ++i) c += inc[i] * inc[i + 1];
  c /= static_cast<double>(inc.size() - 1) * 0.01;
  EXPECT_LT(std::abs(c), 4.0 / std::sqrt(static_cast<double>(inc.size())));
}

TEST(SimulateExact, OverflowIsReported) {
  NoiseStream noise(3);
  try {
    simulate_mode_exact(3 * kPi, kRef, 1.0, TimeGrid(1.0, 0.001), noise, 3, 1e6);
    FAIL() << "expected overflow";
  } catch (const PathOverflowError& e) {
    EXPECT_EQ(e.mode_index(), 3u);
    EXPECT_GT(e.step(), 0u);
  }
}

TEST(SimulateEuler, DeterministicStep) {
  ModelParams p{2.0, 1.0, 0.0, 0.0};  // lambda = 1: a = -1
  NoiseStream noise(1);
  const auto path = simulate_mode_euler(1.0, p, 1.0, TimeGrid(0.1, 0.1), noise);
  ASSERT_EQ(path.values.size(), 2u);
  EXPECT_DOUBLE_EQ(path.values[1], 0.9);

  const auto zero = simulate_mode_euler(1.0, p, 0.0, TimeGrid(1.0, 0.1), noise);
  for (double v : zero.values) EXPECT_EQ(v, 0.0);
}

TEST(SimulateEuler, VarianceFollowsSchemeRecursion) {
  // Oracle: E[u_{n+1}^2] = (1 + a dt)^2 E[u_n^2] + b^2 dt for the Euler chain.
  const double lam = 8 * kPi;
  const double a = drift_coefficient(lam, kRef);
  const TimeGrid grid(0.2, 0.005);
  double v = 0.0;
  for (std::size_t n = 0; n < grid.n_steps(); ++n) v = (1 + a * grid.dt()) * (1 + a * grid.dt()) * v + grid.dt();
  std::vector<double> sq;
  for (std::uint64_t r = 0; r < 20000; ++r) {
    auto noise = NoiseStream::substream(2, r, 8);
    const auto path = simulate_mode_euler(lam, kRef, 0.0, grid, noise, 8);
    sq.push_back(path.values.back() * path.values.back());
  }
  const auto m = oracle::sample_moments(sq);
  EXPECT_NEAR(m.mean, v, 4 * m.std_error);
  // The scheme's stationary variance is biased away from the exact one.
  EXPECT_GT(v, second_moment_at(0.0, lam, kRef, 0.2) * 1.1);
}

TEST(SimulateEuler, StiffModesOverflow) {
  // |1 + a dt| > 1 for lambda = 50 pi at dt = 1e-3 under theta = 0.5, beta = 10.
  NoiseStream noise(9);
  EXPECT_THROW(simulate_mode_euler(50 * kPi, kRef, 0.0, TimeGrid(1.0, 0.001), noise, 50),
               PathOverflowError);
}

TEST(SimulateEnsemble, SeedDeterminism) {
  const auto basis = build_basis(1, 12);
  const std::vector<double> ic(12, 0.0);
  const TimeGrid grid(0.5, 0.001);
  const auto a = simulate_ensemble(basis, kRef, ic, grid, 42);
  const auto b = simulate_ensemble(basis, kRef, ic, grid, 42);
  const auto c = simulate_ensemble(basis, kRef, ic, grid, 43);
  ASSERT_EQ(a.paths.size(), 12u);
  for (std::size_t k = 0; k < 12; ++k) {
    EXPECT_EQ(a.paths[k].values, b.paths[k].values);
    EXPECT_NE(a.paths[k].values, c.paths[k].values);
  }
  // Per-mode substreams do not depend on how many modes are simulated.
  const auto small = simulate_ensemble(build_basis(1, 5), kRef, std::vector<double>(5, 0.0),
                                       grid, 42);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(small.paths[k].values, a.paths[k].values);
  // Replications draw different substreams.
  const auto r1 = simulate_ensemble(basis, kRef, ic, grid, 42, Scheme::exact, {1});
  EXPECT_NE(r1.paths[0].values, a.paths[0].values);
}

TEST(SimulateEnsemble, VanishingNoise) {
  ModelParams p{0.5, 1.0, 1e-12, 0.0};
  const auto e = simulate_ensemble(build_basis(1, 1), p, std::vector<double>{0.0},
                                   TimeGrid(1.0, 0.01), 1);
  for (double v : e.paths[0].values) EXPECT_LT(std::abs(v), 1e-10);
}

TEST(SimulateEnsemble, LinearInSigma) {
  const auto basis = build_basis(1, 8);
  const std::vector<double> ic(8, 0.0);
  const TimeGrid grid(0.3, 0.001);
  ModelParams p2 = kRef;
  p2.sigma = 2.0;
  ModelParams p3 = kRef;
  p3.sigma = 3.7;
  const auto base = simulate_ensemble(basis, kRef, ic, grid, 7);
  const auto twice = simulate_ensemble(basis, p2, ic, grid, 7);
  const auto scaled = simulate_ensemble(basis, p3, ic, grid, 7);
  for (std::size_t k = 0; k < 8; ++k) {
    for (std::size_t i = 0; i < grid.n_points(); ++i) {
      EXPECT_EQ(twice.paths[k].values[i], 2.0 * base.paths[k].values[i]);
      EXPECT_NEAR(scaled.paths[k].values[i], 3.7 * base.paths[k].values[i],
                  1e-13 * std::abs(scaled.paths[k].values[i]) + 1e-300);
    }
  }
}

TEST(SimulateEnsemble, Validation) {
  const auto basis = build_basis(1, 3);
  EXPECT_THROW(simulate_ensemble(basis, kRef, std::vector<double>(2, 0.0), TimeGrid(1, 0.1), 1),
               ValidationError);
  EXPECT_THROW(simulate_ensemble(basis, {-1, 1, 1, 0}, std::vector<double>(3, 0.0),
                                 TimeGrid(1, 0.1), 1),
               ValidationError);
  EXPECT_THROW(TimeGrid(1.0, 0.3), ValidationError);
  EXPECT_THROW(TimeGrid(1.0, 0.0), ValidationError);
  EXPECT_EQ(TimeGrid(1.0, 0.001).n_steps(), 1000u);
  EXPECT_EQ(TimeGrid(0.25, 0.001).n_steps(), 250u);
}

TEST(SimulateEnsemble, OverflowCarriesModeIndex) {
  const auto basis = build_basis(1, 50);
  try {
    simulate_ensemble(basis, kRef, std::vector<double>(50, 0.0), TimeGrid(1.0, 0.001), 1,
                      Scheme::euler);
    FAIL() << "expected overflow";
  } catch (const PathOverflowError& e) {
    EXPECT_GE(e.mode_index(), 23u);
  }
}

TEST(DiracInitialCoefficients, Examples) {
  const auto two = dirac_initial_coefficients(build_basis(1, 2), 0.5);
  EXPECT_NEAR(two[0], std::numbers::sqrt2, 1e-15);
  EXPECT_NEAR(two[1], 0.0, 1e-15);
  for (double x : {0.0, 1.0}) {
    for (double c : dirac_initial_coefficients(build_basis(1, 10), x)) EXPECT_NEAR(c, 0.0, 1e-14);
  }
  const auto b = build_basis(1, 6);
  const auto c = dirac_initial_coefficients(b, 0.3);
  for (std::size_t k = 1; k <= 6; ++k) EXPECT_EQ(c[k - 1], eigenfunction_value(b, k, 0.3));
}

TEST(Field, EvaluateAndTrajectory) {
  const auto zero = constant_ensemble(3, {0, 0, 0});
  EXPECT_EQ(evaluate_field(zero, 2, 0.4), 0.0);

  const auto single = constant_ensemble(3, {1.7, 0, 0});
  EXPECT_NEAR(evaluate_field(single, 0, 0.5), 1.7 * std::numbers::sqrt2, 1e-15);

  const auto even = constant_ensemble(4, {0, 0, 0, 2.5});
  for (double v : trajectory_at(even, 0.5)) EXPECT_NEAR(v, 0.0, 1e-14);

  const auto ens = simulate_ensemble(build_basis(1, 10), kRef, std::vector<double>(10, 0.0),
                                     TimeGrid(0.1, 0.001), 3);
  const auto edge = trajectory_at(ens, 0.0);
  ASSERT_EQ(edge.size(), 101u);
  for (double v : edge) EXPECT_EQ(v, 0.0);
  const auto mid = trajectory_at(ens, 0.37);
  for (std::size_t i = 0; i < mid.size(); i += 17) EXPECT_EQ(mid[i], evaluate_field(ens, i, 0.37));

  EXPECT_THROW(trajectory_at(ens, 1.5), ValidationError);
  EXPECT_THROW(evaluate_field(ens, 101, 0.5), ValidationError);
}

TEST(Field, ParsevalMatchesQuadrature) {
  EXPECT_EQ(parseval_norm(constant_ensemble(3, {0, 0, 0}), 0), 0.0);
  EXPECT_EQ(parseval_norm(constant_ensemble(3, {1, 0, 0}), 1), 1.0);

  const auto ens = simulate_ensemble(build_basis(1, 10), kRef,
                                     dirac_initial_coefficients(build_basis(1, 10), 0.3),
                                     TimeGrid(0.1, 0.001), 17);
  for (std::size_t t : {0u, 50u, 100u}) {
    const double quad = oracle::midpoint_integral(
        [&](double x) {
          const double f = evaluate_field(ens, t, x);
          return f * f;
        },
        10000);
    const double pn = parseval_norm(ens, t);
    EXPECT_NEAR(quad, pn, 1e-6 * std::max(1.0, pn));
  }
}
