#pragma once

#include <vector>

#include "superkrylov/minimax.hpp"

namespace superkrylov::testing {

/// Worst-case error of x_hat_component(t_eval) from a direct discretization
/// of the coupled two-point boundary-value problem
///
///   p' =  A p + (1/q) B B^T g,                                p(0)   = 0
///   g' = -A^T g - e_c delta(t - t_eval) + r sum_s delta(t - t_s) e_0 p_0(t_s),  g(tau) = 0
///
/// with B = e_{M-1} (last-component forcing) or I (full-state forcing).
/// sigma^2 = p_c(t_eval). The grid is uniform with `intervals` steps, augmented
/// with the data and evaluation times; each step uses the trapezoidal rule and
/// the delta terms become jumps in g. The whole system is one sparse solve.
double bvp_certificate_sigma(const minimax::EstimatorModel& model,
                             const std::vector<double>& timepoints, double t_eval, int component,
                             int intervals = 4000);

}  // namespace superkrylov::testing
