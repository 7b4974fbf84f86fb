#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "superkrylov/spectral.hpp"

namespace superkrylov::measurement {

/// Noisy samples y_s = R_jk(t_s) + eta_s of one recovery-probability series.
struct MeasurementSeries {
  int j = 0;
  int k = 0;
  std::vector<double> timepoints;
  std::vector<double> values;
  double theta = 0.0;
  std::uint64_t seed = 0;

  std::size_t size() const { return timepoints.size(); }
  /// Throws InvalidArgument unless timepoints are strictly increasing,
  /// positive, D >= 2 and values are finite and of matching length.
  void validate() const;
};

/// Weights (q, r) of the ellipsoidal uncertainty set
///   q ||f||^2 + r ||eta||^2 <= 1.
struct NoiseBudget {
  double q = 0.0;
  double r = 0.0;
  double f_norm_sq_bound = 0.0;
  double eta_norm_sq_bound = 0.0;
};

/// Ratio cap r <= kMaxWeightRatio * q, applied when the noise bound is zero
/// (r -> infinity) or tiny.
inline constexpr double kMaxWeightRatio = 1e12;

/// D equally spaced points in the open window (t_star - delta_t, t_star + delta_t),
/// inset by half a spacing at each end.
std::vector<double> sample_grid(double t_star, double delta_t, int D);

MeasurementSeries measure_series(const spectral::SpectralDecomposition& spec,
                                 const spectral::StateVector& v, int j, int k,
                                 const std::vector<double>& grid, double theta, std::uint64_t seed);

/// Same as measure_series but from a precomputed signal.
MeasurementSeries measure_series(const spectral::RecoverySignal& signal, int j, int k,
                                 const std::vector<double>& grid, double theta, std::uint64_t seed);

/// The equality point q = 1 / (2 f_norm_sq), r = 1 / (2 eta_norm_sq).
NoiseBudget select_qr(double f_norm_sq, double eta_norm_sq);

/// Default bound on ||eta||^2 for D samples of N(0, theta^2) noise: 2 D theta^2.
double default_eta_norm_sq(int D, double theta);

/// Integral of f(t) over [a, b], composite Gauss-Legendre (10 nodes per panel).
double integrate(const std::function<double(double)>& f, double a, double b, int panels = 64);

/// ||f||^2 = int_0^tau (d^M/dt^M R)^2 dt, the forcing energy of the order-M chain model.
double forcing_norm_sq(const spectral::RecoverySignal& signal, int M, double tau);

/// Budget used by the simulator: exact forcing norm, eta bound 2 D theta^2
/// (or an explicit bound), and r capped at kMaxWeightRatio * q.
NoiseBudget simulation_budget(double f_norm_sq, int D, double theta,
                              std::optional<double> eta_norm_sq = std::nullopt);

/// CSV with columns pair_j,pair_k,t,y,theta,seed.
void write_series_csv(std::ostream& os, const std::vector<MeasurementSeries>& series);

}  // namespace superkrylov::measurement
