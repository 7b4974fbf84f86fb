#pragma once

#include <string>
#include <vector>

#include "superkrylov/measurement.hpp"
#include "superkrylov/types.hpp"

namespace superkrylov::minimax {

/// Which state components the unknown forcing f enters.
///
/// LastComponent: x' = A x + e_{M-1} f, so x_{M-1}' = f is the only unknown
/// and the fitted x_0 is a smooth spline-like curve with x_0' = x_1.
/// FullState: x' = A x + f with f in L2^M, so every component carries its
/// own forcing. This is the model whose Gram kernel sums all M components.
enum class ForcingModel { LastComponent, FullState };

std::string to_string(ForcingModel f);
ForcingModel forcing_from_string(const std::string& s);

/// Companion-form chain model x_l' = x_{l+1} on [0, tau] with x(0) = x_in.
struct EstimatorModel {
  int M = 3;
  VectorXr x_in;
  double tau = 0.0;
  measurement::NoiseBudget budget;
  ForcingModel forcing = ForcingModel::LastComponent;

  /// Components with an independent forcing input.
  int first_forced() const { return forcing == ForcingModel::LastComponent ? M - 1 : 0; }
};

EstimatorModel build_model(int M, VectorXr x_in, double tau, measurement::NoiseBudget budget,
                           ForcingModel forcing = ForcingModel::LastComponent);

/// x_in = (R(0), R'(0), ..., R^{(M-1)}(0)) = (1, 0, -2 (k-j)^2 Var_v(H), ...).
VectorXr recovery_initial_state(const spectral::RecoverySignal& signal, int M);

/// [e^{At} x_in]_c = sum_{p >= c} x_in[p] t^{p-c} / (p-c)!
double homogeneous(const EstimatorModel& model, double t, int component);

/// Inner product of the representers of y(t_i) and y(t_j):
///   K_ij = int_0^{min(t_i,t_j)} sum_{p forced} (t_i - s)^p (t_j - s)^p / (p!)^2 ds.
double kernel_entry(const EstimatorModel& model, double ti, double tj);
MatrixXr kernel_matrix(const EstimatorModel& model, const std::vector<double>& timepoints);

/// Response of component c at time t to the representer of y(t_i):
///   int_0^{min(t,t_i)} sum_{p forced, p >= c} (t - s)^{p-c}/(p-c)! (t_i - s)^p/p! ds.
double response_entry(const EstimatorModel& model, double t, double ti, int component);

struct MinimaxFit {
  VectorXr beta;
  EstimatorModel model;
  std::vector<double> timepoints;
  double residual_norm = 0.0;
};

MinimaxFit fit(const EstimatorModel& model, const std::vector<double>& timepoints,
               const std::vector<double>& values);
MinimaxFit fit(const EstimatorModel& model, const measurement::MeasurementSeries& series);

/// x_hat_c(t) = [e^{At} x_in]_c + sum_i beta_i response_entry(t, t_i, c).
double evaluate(const MinimaxFit& fit, double t, int component);
double evaluate_x0(const MinimaxFit& fit, double t);
double evaluate_x1(const MinimaxFit& fit, double t);

struct ErrorCertificate {
  double t_eval = 0.0;
  int component = 0;
  double sigma = 0.0;
};

/// Worst-case error of x_hat_component(t_eval) over the ellipsoid
/// q ||f||^2 + r ||eta||^2 <= 1:
///   sigma^2 = (1/q) (<L, L> - g^T (K + (q/r) I)^{-1} g),
/// where L is the representer of the functional and g_i = <k_i, L>.
ErrorCertificate error_certificate(const EstimatorModel& model,
                                   const std::vector<double>& timepoints, double t_eval,
                                   int component);

/// JSON text holding beta, timepoints, q, r, x_in, tau, M and the forcing model.
std::string fit_to_json(const MinimaxFit& fit);
MinimaxFit fit_from_json(const std::string& text);

}  // namespace superkrylov::minimax
