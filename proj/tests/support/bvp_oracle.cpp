#include "bvp_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace superkrylov::testing {

double bvp_certificate_sigma(const minimax::EstimatorModel& model,
                             const std::vector<double>& timepoints, double t_eval, int component,
                             int intervals) {
  const int M = model.M;
  const double q = model.budget.q;
  const double r = model.budget.r;
  const bool full = model.forcing == minimax::ForcingModel::FullState;

  std::vector<double> nodes;
  for (int i = 0; i <= intervals; ++i) nodes.push_back(model.tau * i / intervals);
  nodes.insert(nodes.end(), timepoints.begin(), timepoints.end());
  nodes.push_back(t_eval);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-13; }),
              nodes.end());
  const int n = static_cast<int>(nodes.size()) - 1;

  auto node_of = [&](double t) {
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), t - 1e-13);
    return static_cast<int>(it - nodes.begin());
  };
  std::vector<int> data_count(nodes.size(), 0);
  for (double t : timepoints) ++data_count[static_cast<std::size_t>(node_of(t))];
  const int te = node_of(t_eval);

  // Unknowns per node: p (M values) then g^- (M values).
  auto P = [&](int i, int a) { return i * 2 * M + a; };
  auto Gm = [&](int i, int a) { return i * 2 * M + M + a; };
  const int size = (n + 1) * 2 * M;

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
  int row = 0;

  // coeff * g^+_{i,a} with g^+ = g^- + r * count * e_0 p_0 - e_c [i == te]
  auto add_gplus = [&](int eq, int i, int a, double coeff) {
    trip.emplace_back(eq, Gm(i, a), coeff);
    if (a == 0 && data_count[static_cast<std::size_t>(i)] > 0)
      trip.emplace_back(eq, P(i, 0), coeff * r * data_count[static_cast<std::size_t>(i)]);
    if (a == component && i == te) rhs(eq) += coeff;
  };
  auto forced = [&](int a) { return full || a == M - 1; };

  for (int a = 0; a < M; ++a) trip.emplace_back(row++, P(0, a), 1.0);

  for (int i = 0; i < n; ++i) {
    const double h = nodes[static_cast<std::size_t>(i + 1)] - nodes[static_cast<std::size_t>(i)];
    for (int a = 0; a < M; ++a) {
      // p_{i+1} - p_i - h/2 (A p_i + A p_{i+1} + (1/q) B B^T (g^+_i + g^-_{i+1})) = 0
      const int eq = row++;
      trip.emplace_back(eq, P(i + 1, a), 1.0);
      trip.emplace_back(eq, P(i, a), -1.0);
      if (a + 1 < M) {
        trip.emplace_back(eq, P(i, a + 1), -0.5 * h);
        trip.emplace_back(eq, P(i + 1, a + 1), -0.5 * h);
      }
      if (forced(a)) {
        add_gplus(eq, i, a, -0.5 * h / q);
        trip.emplace_back(eq, Gm(i + 1, a), -0.5 * h / q);
      }
    }
    for (int a = 0; a < M; ++a) {
      // g^-_{i+1} - g^+_i + h/2 (A^T g^+_i + A^T g^-_{i+1}) = 0
      const int eq = row++;
      trip.emplace_back(eq, Gm(i + 1, a), 1.0);
      add_gplus(eq, i, a, -1.0);
      if (a >= 1) {
        add_gplus(eq, i, a - 1, 0.5 * h);
        trip.emplace_back(eq, Gm(i + 1, a - 1), 0.5 * h);
      }
    }
  }
  for (int a = 0; a < M; ++a) add_gplus(row++, n, a, 1.0);

  Eigen::SparseMatrix<double> A(size, size);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw std::runtime_error("BVP oracle factorization failed");
  const Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw std::runtime_error("BVP oracle solve failed");
  return std::sqrt(std::max(0.0, x(P(te, component))));
}

}  // namespace superkrylov::testing
