#include "superkrylov/minimax.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <json.hpp>

#include "superkrylov/error.hpp"
#include "superkrylov/polynomial.hpp"

namespace superkrylov::minimax {

using poly::factorial;
using poly::shifted_product_integral;

std::string to_string(ForcingModel f) {
  return f == ForcingModel::LastComponent ? "last_component" : "full_state";
}

ForcingModel forcing_from_string(const std::string& s) {
  if (s == "last_component") return ForcingModel::LastComponent;
  if (s == "full_state") return ForcingModel::FullState;
  throw Error(ErrorCode::InvalidArgument, "unknown forcing model '" + s + "'");
}

EstimatorModel build_model(int M, VectorXr x_in, double tau, measurement::NoiseBudget budget,
                           ForcingModel forcing) {
  if (M < 2) throw Error(ErrorCode::InvalidArgument, "M must be >= 2");
  if (x_in.size() != M) throw Error(ErrorCode::DimensionMismatch, "x_in must have M entries");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(ErrorCode::BadHorizon, "tau must be > 0");
  if (!(budget.q > 0.0) || !(budget.r > 0.0))
    throw Error(ErrorCode::NonPositiveBound, "q and r must be positive");
  return EstimatorModel{M, std::move(x_in), tau, budget, forcing};
}

VectorXr recovery_initial_state(const spectral::RecoverySignal& signal, int M) {
  if (M < 2) throw Error(ErrorCode::InvalidArgument, "M must be >= 2");
  VectorXr x(M);
  for (int p = 0; p < M; ++p) x(p) = signal.derivative(0.0, p);
  x(0) = 1.0;
  x(1) = 0.0;
  return x;
}

double homogeneous(const EstimatorModel& model, double t, int component) {
  double total = 0.0;
  for (int p = component; p < model.M; ++p)
    total += model.x_in(p) * std::pow(t, p - component) / factorial(p - component);
  return total;
}

double kernel_entry(const EstimatorModel& model, double ti, double tj) {
  const double u = std::min(ti, tj);
  double total = 0.0;
  for (int p = model.first_forced(); p < model.M; ++p) {
    const double f = factorial(p);
    total += shifted_product_integral(p, ti, p, tj, u) / (f * f);
  }
  return total;
}

MatrixXr kernel_matrix(const EstimatorModel& model, const std::vector<double>& timepoints) {
  const auto D = static_cast<Eigen::Index>(timepoints.size());
  MatrixXr K(D, D);
  for (Eigen::Index i = 0; i < D; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      K(i, j) = K(j, i) = kernel_entry(model, timepoints[static_cast<std::size_t>(i)],
                                       timepoints[static_cast<std::size_t>(j)]);
  return K;
}

double response_entry(const EstimatorModel& model, double t, double ti, int component) {
  const double u = std::min(t, ti);
  double total = 0.0;
  for (int p = std::max(component, model.first_forced()); p < model.M; ++p)
    total += shifted_product_integral(p - component, t, p, ti, u) /
             (factorial(p - component) * factorial(p));
  return total;
}

namespace {

void check_timepoints(const EstimatorModel& model, const std::vector<double>& timepoints) {
  if (timepoints.empty()) throw Error(ErrorCode::InvalidArgument, "no timepoints");
  for (std::size_t s = 0; s < timepoints.size(); ++s) {
    if (!(timepoints[s] >= 0.0) || (s > 0 && !(timepoints[s] > timepoints[s - 1])))
      throw Error(ErrorCode::InvalidArgument, "timepoints must be increasing and >= 0");
    if (!(timepoints[s] < model.tau))
      throw Error(ErrorCode::BadHorizon, "timepoint beyond the horizon tau");
  }
}

void check_component(const EstimatorModel& model, int component) {
  if (component < 0 || component >= model.M)
    throw Error(ErrorCode::IndexOutOfRange, "state component out of range");
}

MatrixXr regularized_kernel(const EstimatorModel& model, const std::vector<double>& timepoints) {
  MatrixXr K = kernel_matrix(model, timepoints);
  K.diagonal().array() += model.budget.q / model.budget.r;
  return K;
}

}  // namespace

MinimaxFit fit(const EstimatorModel& model, const std::vector<double>& timepoints,
               const std::vector<double>& values) {
  check_timepoints(model, timepoints);
  if (values.size() != timepoints.size())
    throw Error(ErrorCode::DimensionMismatch, "values and timepoints differ in length");

  const auto D = static_cast<Eigen::Index>(timepoints.size());
  VectorXr y_tilde(D);
  for (Eigen::Index s = 0; s < D; ++s) {
    const auto i = static_cast<std::size_t>(s);
    y_tilde(s) = values[i] - homogeneous(model, timepoints[i], 0);
  }
  if (!y_tilde.allFinite()) throw Error(ErrorCode::SingularSystem, "non-finite data");

  const MatrixXr system = regularized_kernel(model, timepoints);
  Eigen::LLT<MatrixXr> llt(system);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::SingularSystem, "(q/r) I + K is not positive definite");
  VectorXr beta = llt.solve(y_tilde);
  if (!beta.allFinite()) throw Error(ErrorCode::SingularSystem, "solve produced non-finite beta");
  const double residual = (system * beta - y_tilde).norm();
  return MinimaxFit{std::move(beta), model, timepoints, residual};
}

MinimaxFit fit(const EstimatorModel& model, const measurement::MeasurementSeries& series) {
  series.validate();
  return fit(model, series.timepoints, series.values);
}

double evaluate(const MinimaxFit& f, double t, int component) {
  check_component(f.model, component);
  if (!(t >= 0.0) || t > f.model.tau)
    throw Error(ErrorCode::OutOfHorizon, "evaluation time outside [0, tau]");
  double total = homogeneous(f.model, t, component);
  for (std::size_t i = 0; i < f.timepoints.size(); ++i)
    total += f.beta(static_cast<Eigen::Index>(i)) *
             response_entry(f.model, t, f.timepoints[i], component);
  return total;
}

double evaluate_x0(const MinimaxFit& f, double t) { return evaluate(f, t, 0); }
double evaluate_x1(const MinimaxFit& f, double t) { return evaluate(f, t, 1); }

ErrorCertificate error_certificate(const EstimatorModel& model,
                                   const std::vector<double>& timepoints, double t_eval,
                                   int component) {
  check_timepoints(model, timepoints);
  check_component(model, component);
  if (!(t_eval >= 0.0) || t_eval > model.tau)
    throw Error(ErrorCode::OutOfHorizon, "t_eval outside [0, tau]");

  // <L, L> = int_0^{t_eval} sum_{p forced, p >= c} ((t_eval - s)^{p-c} / (p-c)!)^2 ds
  double self = 0.0;
  for (int p = std::max(component, model.first_forced()); p < model.M; ++p) {
    const double f = factorial(p - component);
    self += shifted_product_integral(p - component, t_eval, p - component, t_eval, t_eval) /
            (f * f);
  }

  const auto D = static_cast<Eigen::Index>(timepoints.size());
  VectorXr g(D);
  for (Eigen::Index i = 0; i < D; ++i)
    g(i) = response_entry(model, t_eval, timepoints[static_cast<std::size_t>(i)], component);

  Eigen::LLT<MatrixXr> llt(regularized_kernel(model, timepoints));
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::BVPSolveFailure, "certificate system is not positive definite");
  const double explained = g.dot(llt.solve(g));
  if (!std::isfinite(explained)) throw Error(ErrorCode::BVPSolveFailure, "non-finite certificate");
  // Cancellation can leave a tiny negative remainder when the data pin the
  // functional almost exactly.
  const double variance = std::max(0.0, self - explained) / model.budget.q;
  return ErrorCertificate{t_eval, component, std::sqrt(variance)};
}

std::string fit_to_json(const MinimaxFit& f) {
  nlohmann::json j;
  j["M"] = f.model.M;
  j["forcing"] = to_string(f.model.forcing);
  j["tau"] = f.model.tau;
  j["q"] = f.model.budget.q;
  j["r"] = f.model.budget.r;
  j["f_norm_sq_bound"] = f.model.budget.f_norm_sq_bound;
  j["eta_norm_sq_bound"] = f.model.budget.eta_norm_sq_bound;
  j["x_in"] = std::vector<double>(f.model.x_in.data(), f.model.x_in.data() + f.model.x_in.size());
  j["timepoints"] = f.timepoints;
  j["beta"] = std::vector<double>(f.beta.data(), f.beta.data() + f.beta.size());
  j["residual_norm"] = f.residual_norm;
  return j.dump();
}

MinimaxFit fit_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const auto x_in = j.at("x_in").get<std::vector<double>>();
    const auto beta = j.at("beta").get<std::vector<double>>();
    measurement::NoiseBudget budget{j.at("q").get<double>(), j.at("r").get<double>(),
                                    j.value("f_norm_sq_bound", 0.0),
                                    j.value("eta_norm_sq_bound", 0.0)};
    EstimatorModel model = build_model(
        j.at("M").get<int>(), Eigen::Map<const VectorXr>(x_in.data(), static_cast<Eigen::Index>(x_in.size())),
        j.at("tau").get<double>(), budget, forcing_from_string(j.at("forcing").get<std::string>()));
    MinimaxFit f{Eigen::Map<const VectorXr>(beta.data(), static_cast<Eigen::Index>(beta.size())),
                 std::move(model), j.at("timepoints").get<std::vector<double>>(),
                 j.value("residual_norm", 0.0)};
    if (f.beta.size() != static_cast<Eigen::Index>(f.timepoints.size()))
      throw Error(ErrorCode::DimensionMismatch, "beta and timepoints differ in length");
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad fit JSON: ") + e.what());
  }
}

}  // namespace superkrylov::minimax
