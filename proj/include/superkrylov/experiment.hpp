#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "superkrylov/config.hpp"
#include "superkrylov/krylov.hpp"
#include "superkrylov/measurement.hpp"
#include "superkrylov/minimax.hpp"
#include "superkrylov/pauli.hpp"
#include "superkrylov/spectral.hpp"

namespace superkrylov::experiment {

inline constexpr int kSchemaVersion = 1;

/// Hamiltonian plus its exact spectrum, the reference for every error column.
struct Problem {
  pauli::HermitianMatrix h;
  spectral::SpectralDecomposition spec;
  pauli::HamiltonianClass class_tag;
  std::optional<double> top_energy;

  double ground_energy() const { return spec.lowest(); }
  /// ||J||_2 = lambda_{N-1} - lambda_0.
  double commutator_norm() const { return spec.highest() - spec.lowest(); }
};

Problem build_problem(const ExperimentConfig& config);

/// Krylov timestep and measurement window: delta_t = fraction * t*, and the
/// model horizon tau = t* + 2 delta_t.
struct Window {
  double t_star = 0.0;
  double delta_t = 0.0;
  double tau = 0.0;
};

Window make_window(const ExperimentConfig& config, const spectral::SpectralDecomposition& spec);

/// One measured and fitted series.
struct SeriesFit {
  measurement::MeasurementSeries series;
  minimax::MinimaxFit fit;
};

/// Measure R_jk on `grid`, choose (q, r) from the exact forcing norm and the
/// noise bound, and fit the minimax estimator. With `exact_noise_budget` the
/// noise bound is the realized ||eta||^2 rather than 2 D theta^2.
SeriesFit measure_and_fit(const spectral::RecoverySignal& signal, int j, int k,
                          const std::vector<double>& grid, double theta, std::uint64_t seed,
                          int M, double tau, minimax::ForcingModel forcing,
                          bool exact_noise_budget);

double epsilon_for(const ExperimentConfig& config, int m, double theta);

/// Run fn(0) .. fn(count - 1) on up to `threads` workers. Each index is
/// handled exactly once; the first exception is rethrown after all workers stop.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

struct ConvergenceRecord {
  int m = 0;
  double theta = 0.0;
  double gamma0 = 0.0;
  int trial = 0;
  double delta0_prime = 0.0;
  double estimate = 0.0;
  double rel_error = 0.0;
  double omega = 0.0;
  int kept_dim = 0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
};

/// One record per (gamma0, theta, trial, m), ordered in that nesting.
std::vector<ConvergenceRecord> run_convergence(const ExperimentConfig& config, int threads = 1);
void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRecord>& records);

struct DerivativeRecord {
  int D = 0;
  double theta = 0.0;
  int trial = 0;
  double abs_error = 0.0;
  double sigma = 0.0;
};

struct DerivativeSummary {
  int D = 0;
  double theta = 0.0;
  double mean_abs_error = 0.0;
  double mean_sigma = 0.0;
};

struct DerivativeScaling {
  std::vector<DerivativeRecord> records;     // ordered by (theta, D, trial)
  std::vector<DerivativeSummary> summaries;  // ordered by (theta, D)
};

DerivativeScaling run_derivative_scaling(const ExperimentConfig& config, int threads = 1);
/// Trial rows followed by summary rows whose trial column reads "mean".
void write_derivative_csv(std::ostream& os, const DerivativeScaling& result);

struct DemoRow {
  double t = 0.0;
  double exact_R = 0.0;
  double exact_dR = 0.0;
  double xhat0_rlow = 0.0;
  double xhat0_r0 = 0.0;
  double xhat0_rhigh = 0.0;
  double xhat1 = 0.0;
  double sigma = 0.0;
};

struct MinimaxDemo {
  std::vector<DemoRow> rows;
  measurement::MeasurementSeries series;
  std::vector<minimax::MinimaxFit> r_sweep;  // r0 / 10, r0, 10 r0 at q = q0
  std::vector<double> data_misfit;           // sum_s (y_s - x_hat0(t_s))^2 per r_sweep entry
  std::vector<double> q_scale = {0.1, 1.0, 10.0};
  std::vector<double> roughness;             // forcing energy beta' K beta for q = q_scale * q0 at r0
};

MinimaxDemo run_minimax_demo(const ExperimentConfig& config);
void write_demo_csv(std::ostream& os, const MinimaxDemo& demo);
void write_demo_points_csv(std::ostream& os, const MinimaxDemo& demo);

struct GramDump {
  krylov::KrylovPair exact;
  std::optional<krylov::KrylovPair> estimated;
  krylov::FitMap fits;
};

/// Pairs for the first gamma0 / theta at the largest m; the estimated pair is
/// present whenever minimax fitting is in effect.
GramDump run_gram(const ExperimentConfig& config);
void write_gram_csv(std::ostream& os, const GramDump& dump);

/// Run a CLI subcommand and write `<name>.csv` (plus auxiliary CSVs) and
/// `manifest.json` into `out_dir`. Returns the paths written.
std::vector<std::string> run_subcommand(const std::string& name, const ExperimentConfig& config,
                                        const std::string& out_dir, int threads);

}  // namespace superkrylov::experiment
