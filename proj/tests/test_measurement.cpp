#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "superkrylov/measurement.hpp"
#include "checks.hpp"
#include "toy.hpp"

using namespace superkrylov;
using namespace superkrylov::measurement;
using superkrylov::testing::expect_error;
using superkrylov::testing::ToyProblem;

TEST(Grid, FifteenPointsInsideWindow) {
  const auto g = sample_grid(0.5, 0.15, 15);
  ASSERT_EQ(g.size(), 15u);
  EXPECT_GT(g.front(), 0.35);
  EXPECT_LT(g.back(), 0.65);
  EXPECT_NEAR(g[7], 0.5, 1e-15);  // odd D contains t*
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(g[i] - g[i - 1], 0.02, 1e-15);
  EXPECT_NEAR(g.front() - 0.35, 0.01, 1e-15);
}

TEST(Grid, TwoPoints) {
  const auto g = sample_grid(1.0, 0.2, 2);
  EXPECT_NEAR(g[0], 0.9, 1e-15);
  EXPECT_NEAR(g[1], 1.1, 1e-15);
}

TEST(Grid, RelativeWindow) {
  const auto g = sample_grid(0.5, 0.15 * 0.5, 10);
  EXPECT_GT(g.front(), 0.425);
  EXPECT_LT(g.back(), 0.575);
}

TEST(Grid, Errors) {
  expect_error(ErrorCode::BadWindow, [] { sample_grid(0.1, 0.1, 5); });
  expect_error(ErrorCode::BadWindow, [] { sample_grid(0.1, 0.0, 5); });
  expect_error(ErrorCode::InvalidArgument, [] { sample_grid(0.5, 0.1, 1); });
}

TEST(Series, NoiselessIsExact) {
  const ToyProblem toy;
  const auto grid = sample_grid(0.5, 0.15, 7);
  const auto s = measure_series(toy.spec, toy.v, 0, 1, grid, 0.0, 99);
  for (std::size_t i = 0; i < grid.size(); ++i)
    EXPECT_EQ(s.values[i], spectral::recovery_probability(toy.spec, toy.v, 0, 1, grid[i]));
}

TEST(Series, DiagonalIsOnePlusNoise) {
  const ToyProblem toy;
  const auto grid = sample_grid(0.5, 0.15, 200);
  const auto s = measure_series(toy.spec, toy.v, 1, 1, grid, 0.01, 5);
  double mean = 0.0, var = 0.0;
  for (double y : s.values) mean += y;
  mean /= s.size();
  for (double y : s.values) var += (y - mean) * (y - mean);
  var /= s.size() - 1;
  EXPECT_NEAR(mean, 1.0, 0.005);
  EXPECT_NEAR(std::sqrt(var), 0.01, 0.002);
}

TEST(Series, DeterministicForSeed) {
  const ToyProblem toy;
  const auto grid = sample_grid(0.5, 0.15, 15);
  const auto a = measure_series(toy.spec, toy.v, 0, 1, grid, 0.1, 1234);
  const auto b = measure_series(toy.spec, toy.v, 0, 1, grid, 0.1, 1234);
  const auto c = measure_series(toy.spec, toy.v, 0, 1, grid, 0.1, 1235);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, c.values);
}

TEST(Series, CsvColumns) {
  const ToyProblem toy;
  const auto s = measure_series(toy.spec, toy.v, 0, 1, sample_grid(0.5, 0.15, 2), 0.0, 7);
  std::ostringstream os;
  write_series_csv(os, {s});
  std::istringstream in(os.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "pair_j,pair_k,t,y,theta,seed");
  EXPECT_EQ(row.substr(0, 4), "0,1,");
  EXPECT_EQ(row.substr(row.size() - 4), ",0,7");
}

TEST(Budget, EqualityPoint) {
  const auto b = select_qr(1.0, 1.0);
  EXPECT_DOUBLE_EQ(b.q, 0.5);
  EXPECT_DOUBLE_EQ(b.r, 0.5);
  const auto half = select_qr(1.0, 0.5);
  EXPECT_DOUBLE_EQ(half.r, 1.0);
  EXPECT_DOUBLE_EQ(half.q, 0.5);
  expect_error(ErrorCode::NonPositiveBound, [] { select_qr(0.0, 1.0); });
  expect_error(ErrorCode::NonPositiveBound, [] { select_qr(1.0, -1.0); });
}

TEST(Budget, NoiselessCap) {
  const auto b = simulation_budget(2.0, 15, 0.0);
  EXPECT_DOUBLE_EQ(b.q, 0.25);
  EXPECT_DOUBLE_EQ(b.r, kMaxWeightRatio * 0.25);
  const auto noisy = simulation_budget(2.0, 15, 1e-3);
  EXPECT_DOUBLE_EQ(noisy.eta_norm_sq_bound, 2 * 15 * 1e-6);
  EXPECT_DOUBLE_EQ(noisy.r, 0.5 / noisy.eta_norm_sq_bound);
}

TEST(Budget, ForcingNormToy) {
  // R = cos^2 t, R''' = 4 sin 2t, int_0^tau 16 sin^2 2t dt = 8 tau - 2 sin 4 tau
  const ToyProblem toy;
  const spectral::RecoverySignal signal(toy.spec, toy.v, 0, 1);
  const double tau = 0.65;
  EXPECT_NEAR(forcing_norm_sq(signal, 3, tau), 8 * tau - 2 * std::sin(4 * tau), 1e-12);
  EXPECT_NEAR(integrate([](double t) { return std::exp(t); }, 0.0, 1.0, 3), std::numbers::e - 1.0,
              1e-14);
}

TEST(Budget, EtaBoundCoverage) {
  // The 2 D theta^2 bound holds for the realized noise in well over 95% of trials.
  const ToyProblem toy;
  const auto grid = sample_grid(0.5, 0.15, 15);
  const double theta = 1e-3;
  int covered = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = measure_series(toy.spec, toy.v, 0, 1, grid, theta, 1000 + trial);
    double eta = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double e = s.values[i] - std::cos(grid[i]) * std::cos(grid[i]);
      eta += e * e;
    }
    if (eta <= default_eta_norm_sq(15, theta)) ++covered;
  }
  EXPECT_GE(covered, 190);
}
