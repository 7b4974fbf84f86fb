#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "superkrylov/minimax.hpp"

namespace superkrylov::experiment {

enum class EpsRule { NoiseFree, MTheta, Fixed };

/// How the pair (J_hat, R_hat) is obtained in convergence runs.
/// Auto uses exact oracles for theta = 0 and minimax fits otherwise.
enum class PairMode { Auto, Exact, Minimax };

/// Resolved experiment configuration.
///
/// File format: one `key = value` per line, `#` starts a comment. List values
/// are comma separated; integer lists also accept inclusive ranges `a:b` or
/// `a:b:step`, e.g. `m_values = 2:30`.
struct ExperimentConfig {
  std::string model = "heisenberg";  // heisenberg | bipartite | random_hermitian
  int n = 6;                         // qubits (heisenberg, bipartite) or dimension (random_hermitian)
  std::uint64_t coupling_seed = 1;
  std::uint64_t state_seed = 0x5eed5eedULL;
  std::vector<double> gamma0 = {0.25};
  std::vector<int> m_values = {2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> theta_values = {0.0};
  std::vector<int> D_values = {15};
  int M = 3;
  double delta_t_fraction = 0.15;
  std::optional<double> t_star;  // default: pi / (2 (lambda_max - lambda_min))
  EpsRule eps_rule = EpsRule::NoiseFree;
  double eps_value = 0.0;  // used by EpsRule::Fixed
  PairMode pair_mode = PairMode::Auto;
  minimax::ForcingModel forcing = minimax::ForcingModel::LastComponent;
  bool exact_noise_budget = false;  // eta bound from the realized noise instead of 2 D theta^2
  int trials = 1;
  std::uint64_t master_seed = 20240601;
  int pair_j = 0;
  int pair_k = 1;
  int demo_points = 201;

  /// Ordered key/value echo of every field, for manifests.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

std::string to_string(EpsRule rule, double value);
std::string to_string(PairMode mode);

}  // namespace superkrylov::experiment
