#pragma once

#include <cstdint>

#include "superkrylov/pauli.hpp"
#include "superkrylov/types.hpp"

namespace superkrylov::spectral {

/// Eigenvalues in ascending order and unitary eigenvectors (as columns).
/// Each eigenvector's largest-magnitude component is real and positive.
class SpectralDecomposition {
 public:
  SpectralDecomposition(VectorXr eigenvalues, MatrixXc eigenvectors);

  Eigen::Index dim() const { return eigenvalues_.size(); }
  const VectorXr& eigenvalues() const { return eigenvalues_; }
  const MatrixXc& eigenvectors() const { return eigenvectors_; }
  double lowest() const { return eigenvalues_(0); }
  double highest() const { return eigenvalues_(dim() - 1); }

  /// H x computed as U diag(lambda) U^dagger x.
  VectorXc apply(const VectorXc& x) const;

 private:
  VectorXr eigenvalues_;
  MatrixXc eigenvectors_;
};

/// Normalized state; construction rejects vectors whose norm is off by more
/// than 1e-12.
class StateVector {
 public:
  explicit StateVector(VectorXc amplitudes);
  static StateVector normalized(const VectorXc& amplitudes);

  Eigen::Index dim() const { return amplitudes_.size(); }
  const VectorXc& amplitudes() const { return amplitudes_; }

 private:
  VectorXc amplitudes_;
};

SpectralDecomposition eigendecompose(const pauli::HermitianMatrix& h);

/// e^{-iHt} v.
StateVector evolve(const SpectralDecomposition& spec, const StateVector& v, double t);

/// |<v| U^{-j}(t) U^k(t) |v>|^2 with U(t) = e^{-iHt}.
double recovery_probability(const SpectralDecomposition& spec, const StateVector& v, int j, int k,
                            double t);

/// Tr(rho_j(t) [rho_k(t), H]) with rho_j(t) = U^{-j}(t) |v><v| U^j(t).
Complex exact_J_entry(const SpectralDecomposition& spec, const StateVector& v, int j, int k,
                      double t);

/// d^2/dt^2 R_jk(t) = (j - k)^2 Tr([H, rho_j(t)] [H, rho_k(t)]).
double exact_second_derivative(const SpectralDecomposition& spec, const StateVector& v, int j,
                               int k, double t);

/// R_jk(t) depends on (j, k) only through k - j:
///   R(t) = |sum_a w_a exp(-i lambda_a (k - j) t)|^2,  w_a = |<u_a|v>|^2.
/// This class evaluates R and its derivatives of any order in O(N).
class RecoverySignal {
 public:
  RecoverySignal(const SpectralDecomposition& spec, const StateVector& v, int j, int k);

  int gap() const { return gap_; }
  double value(double t) const { return derivative(t, 0); }
  double derivative(double t, int order) const;
  /// Energy variance of v; R''(0) = -2 gap^2 variance.
  double energy_variance() const;

 private:
  VectorXr weights_;
  VectorXr eigenvalues_;
  int gap_;
};

/// Initial state with real overlap <Delta_0|mu> = conj(alpha_{N-1}) alpha_0 = gamma0.
/// alpha_0 = alpha_{N-1} = sqrt(gamma0); the remaining weight is spread
/// evenly over u_1 .. u_{N-2} with phases from a fixed-seed generator.
/// gamma0 must lie in (0, 0.5].
StateVector build_initial_state(const SpectralDecomposition& spec, double gamma0,
                                std::uint64_t phase_seed = 0x5eed5eedULL);

/// I (x) H - conj(H) (x) I, the column-stacked commutator map. Test-scale
/// only (N <= 16).
MatrixXc vectorized_commutator_matrix(const pauli::HermitianMatrix& h);

}  // namespace superkrylov::spectral
