#include "superkrylov/measurement.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "superkrylov/csv.hpp"
#include "superkrylov/error.hpp"
#include "superkrylov/random.hpp"

namespace superkrylov::measurement {

void MeasurementSeries::validate() const {
  if (timepoints.size() < 2) throw Error(ErrorCode::InvalidArgument, "series needs D >= 2");
  if (values.size() != timepoints.size())
    throw Error(ErrorCode::DimensionMismatch, "values and timepoints differ in length");
  if (!(timepoints.front() > 0.0))
    throw Error(ErrorCode::InvalidArgument, "timepoints must be positive");
  for (std::size_t s = 1; s < timepoints.size(); ++s)
    if (!(timepoints[s] > timepoints[s - 1]))
      throw Error(ErrorCode::InvalidArgument, "timepoints must be strictly increasing");
  for (double y : values)
    if (!std::isfinite(y)) throw Error(ErrorCode::InvalidArgument, "non-finite measurement");
}

std::vector<double> sample_grid(double t_star, double delta_t, int D) {
  if (D < 2) throw Error(ErrorCode::InvalidArgument, "grid needs D >= 2");
  if (!(delta_t > 0.0)) throw Error(ErrorCode::BadWindow, "delta_t must be positive");
  if (!(t_star - delta_t > 0.0))
    throw Error(ErrorCode::BadWindow, "window (t* - dt, t* + dt) must stay above 0");
  const double h = 2.0 * delta_t / D;
  std::vector<double> grid(static_cast<std::size_t>(D));
  for (int s = 0; s < D; ++s) grid[static_cast<std::size_t>(s)] = t_star - delta_t + h * (s + 0.5);
  return grid;
}

MeasurementSeries measure_series(const spectral::RecoverySignal& signal, int j, int k,
                                 const std::vector<double>& grid, double theta,
                                 std::uint64_t seed) {
  if (!(theta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "theta must be >= 0");
  MeasurementSeries out{j, k, grid, {}, theta, seed};
  out.values.reserve(grid.size());
  Rng rng(seed);
  for (double t : grid) {
    double y = signal.value(t);
    if (theta > 0.0) y += theta * rng.normal();
    out.values.push_back(y);
  }
  out.validate();
  return out;
}

MeasurementSeries measure_series(const spectral::SpectralDecomposition& spec,
                                 const spectral::StateVector& v, int j, int k,
                                 const std::vector<double>& grid, double theta,
                                 std::uint64_t seed) {
  return measure_series(spectral::RecoverySignal(spec, v, j, k), j, k, grid, theta, seed);
}

NoiseBudget select_qr(double f_norm_sq, double eta_norm_sq) {
  if (!(f_norm_sq > 0.0) || !(eta_norm_sq > 0.0))
    throw Error(ErrorCode::NonPositiveBound, "norm bounds must be positive");
  return {0.5 / f_norm_sq, 0.5 / eta_norm_sq, f_norm_sq, eta_norm_sq};
}

double default_eta_norm_sq(int D, double theta) { return 2.0 * D * theta * theta; }

namespace {

struct GaussRule {
  std::array<double, 10> nodes{};
  std::array<double, 10> weights{};
};

// Roots of P_10 by Newton iteration from the Chebyshev guesses.
GaussRule make_gauss_rule() {
  constexpr int n = 10;
  GaussRule rule;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int l = 2; l <= n; ++l) {
        const double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

const GaussRule& gauss_rule() {
  static const GaussRule rule = make_gauss_rule();
  return rule;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels < 1) throw Error(ErrorCode::InvalidArgument, "need at least one panel");
  const GaussRule& rule = gauss_rule();
  const double width = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + width * (p + 0.5);
    double panel = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      panel += rule.weights[i] * f(mid + 0.5 * width * rule.nodes[i]);
    total += 0.5 * width * panel;
  }
  return total;
}

double forcing_norm_sq(const spectral::RecoverySignal& signal, int M, double tau) {
  if (M < 1) throw Error(ErrorCode::InvalidArgument, "M must be >= 1");
  if (!(tau > 0.0)) throw Error(ErrorCode::BadHorizon, "tau must be positive");
  // The integrand oscillates at most |gap| * spectral width times faster than
  // R itself; 64 ten-point panels resolve it for every gap used in practice.
  const int panels = 64 + 8 * std::abs(signal.gap());
  return integrate(
      [&](double t) {
        const double x = signal.derivative(t, M);
        return x * x;
      },
      0.0, tau, panels);
}

NoiseBudget simulation_budget(double f_norm_sq, int D, double theta,
                              std::optional<double> eta_norm_sq) {
  if (!(f_norm_sq > 0.0)) throw Error(ErrorCode::NonPositiveBound, "forcing norm must be > 0");
  const double eta = eta_norm_sq.value_or(default_eta_norm_sq(D, theta));
  const double q = 0.5 / f_norm_sq;
  if (eta <= 0.0) return {q, kMaxWeightRatio * q, f_norm_sq, 0.0};
  NoiseBudget b = select_qr(f_norm_sq, eta);
  if (b.r > kMaxWeightRatio * q) b.r = kMaxWeightRatio * q;
  return b;
}

void write_series_csv(std::ostream& os, const std::vector<MeasurementSeries>& series) {
  os << "pair_j,pair_k,t,y,theta,seed\n";
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.size(); ++i)
      os << s.j << ',' << s.k << ',' << format_double(s.timepoints[i]) << ','
         << format_double(s.values[i]) << ',' << format_double(s.theta) << ',' << s.seed << '\n';
}

}  // namespace superkrylov::measurement
