#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "superkrylov/minimax.hpp"
#include "superkrylov/pauli.hpp"
#include "superkrylov/spectral.hpp"

namespace superkrylov::krylov {

enum class PairSource { Exact, Minimax };

/// Projected pair (J_hat, R_hat) on the m-dimensional super-Krylov space.
/// Both matrices are Hermitian, with diag(R_hat) = 1 and diag(J_hat) = 0.
struct KrylovPair {
  int m = 0;
  double t_star = 0.0;
  MatrixXc R_hat;
  MatrixXc J_hat;
  PairSource source = PairSource::Exact;
  std::optional<double> omega;
};

struct RitzResult {
  VectorXr ritz_values;  // ascending
  int kept_dim = 0;
  double eps = 0.0;
  double ground_gap() const { return ritz_values(0); }
};

/// Upper triangle from the exact oracles at t_star, lower by Hermitian symmetry.
KrylovPair assemble_pair_exact(const spectral::SpectralDecomposition& spec,
                               const spectral::StateVector& v, int m, double t_star);

/// Fits keyed by pair (j, k), j < k. When `by_gap` is set the map only needs
/// entries (0, d) for d = 1 .. m-1, since R_jk depends on k - j alone.
using FitMap = std::map<std::pair<int, int>, minimax::MinimaxFit>;
KrylovPair assemble_pair_minimax(const FitMap& fits, int m, double t_star, bool by_gap = true);

/// Discard eigendirections of R_hat with eigenvalue <= eps, whiten the rest
/// and diagonalize the whitened J_hat.
RitzResult threshold_solve(const KrylovPair& pair, double eps);

/// Class 1: Delta'_0 + lambda_{N-1}. Class 2: Delta'_0 / 2.
double ground_energy(const RitzResult& result, pauli::HamiltonianClass class_tag,
                     std::optional<double> top_energy);

/// t* = pi / spectral_width where spectral_width = Delta_max - Delta_min of
/// the commutator operator, i.e. 2 (lambda_{N-1} - lambda_0).
double choose_timestep(double spectral_width);

/// omega = ||R_hat - R||_2 + ||J_hat - J||_2 / j_norm with j_norm = ||J||_2 of
/// the full commutator operator (lambda_{N-1} - lambda_0).
double noise_rate(const KrylovPair& estimated, const KrylovPair& exact, double j_norm);

std::string to_string(PairSource s);

}  // namespace superkrylov::krylov
