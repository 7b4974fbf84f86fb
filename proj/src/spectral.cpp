#include "superkrylov/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "superkrylov/error.hpp"
#include "superkrylov/random.hpp"

namespace superkrylov::spectral {

SpectralDecomposition::SpectralDecomposition(VectorXr eigenvalues, MatrixXc eigenvectors)
    : eigenvalues_(std::move(eigenvalues)), eigenvectors_(std::move(eigenvectors)) {
  if (eigenvectors_.rows() != eigenvalues_.size() || eigenvectors_.cols() != eigenvalues_.size())
    throw Error(ErrorCode::DimensionMismatch, "eigenvector matrix does not match eigenvalues");
}

VectorXc SpectralDecomposition::apply(const VectorXc& x) const {
  if (x.size() != dim()) throw Error(ErrorCode::DimensionMismatch, "vector size");
  VectorXc coeffs = eigenvectors_.adjoint() * x;
  coeffs.array() *= eigenvalues_.array().cast<Complex>();
  return eigenvectors_ * coeffs;
}

StateVector::StateVector(VectorXc amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty state");
  if (std::abs(amplitudes_.norm() - 1.0) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "state is not normalized");
}

StateVector StateVector::normalized(const VectorXc& amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0)) throw Error(ErrorCode::InvalidArgument, "cannot normalize a zero vector");
  return StateVector(amplitudes / n);
}

namespace {

void check_dims(const SpectralDecomposition& spec, const StateVector& v) {
  if (spec.dim() != v.dim())
    throw Error(ErrorCode::DimensionMismatch,
                "state has dimension " + std::to_string(v.dim()) + ", operator " +
                    std::to_string(spec.dim()));
}

void check_powers(int j, int k) {
  if (j < 0 || k < 0) throw Error(ErrorCode::InvalidArgument, "Krylov powers must be >= 0");
}

// U^{-j}(t) v = e^{ijHt} v
VectorXc backward(const SpectralDecomposition& spec, const StateVector& v, int j, double t) {
  return evolve(spec, v, -static_cast<double>(j) * t).amplitudes();
}

}  // namespace

SpectralDecomposition eigendecompose(const pauli::HermitianMatrix& h) {
  // HermitianMatrix already guarantees the 1e-10 Hermiticity precondition.
  Eigen::SelfAdjointEigenSolver<MatrixXc> solver(h.entries());
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::ConvergenceFailure, "Hermitian eigensolver did not converge");

  MatrixXc vectors = solver.eigenvectors();
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index arg = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&arg);
    const Complex pivot = vectors(arg, c);
    vectors.col(c) *= std::conj(pivot) / std::abs(pivot);
    vectors(arg, c) = std::abs(vectors(arg, c));
  }
  return SpectralDecomposition(solver.eigenvalues(), std::move(vectors));
}

StateVector evolve(const SpectralDecomposition& spec, const StateVector& v, double t) {
  check_dims(spec, v);
  VectorXc coeffs = spec.eigenvectors().adjoint() * v.amplitudes();
  for (Eigen::Index a = 0; a < coeffs.size(); ++a)
    coeffs(a) *= std::exp(-kI * spec.eigenvalues()(a) * t);
  VectorXc out = spec.eigenvectors() * coeffs;
  // Rounding in U U^dagger is ~1e-15 per entry; renormalize so the strict
  // StateVector invariant holds after many steps.
  return StateVector::normalized(out);
}

double recovery_probability(const SpectralDecomposition& spec, const StateVector& v, int j, int k,
                            double t) {
  check_dims(spec, v);
  check_powers(j, k);
  if (j == k) return 1.0;
  const VectorXc coeffs = spec.eigenvectors().adjoint() * v.amplitudes();
  const double s = static_cast<double>(k - j) * t;
  Complex overlap = 0.0;
  for (Eigen::Index a = 0; a < coeffs.size(); ++a)
    overlap += std::norm(coeffs(a)) * std::exp(-kI * spec.eigenvalues()(a) * s);
  return std::clamp(std::norm(overlap), 0.0, 1.0);
}

Complex exact_J_entry(const SpectralDecomposition& spec, const StateVector& v, int j, int k,
                      double t) {
  check_dims(spec, v);
  check_powers(j, k);
  if (j == k) return 0.0;
  const VectorXc a = backward(spec, v, j, t);
  const VectorXc b = backward(spec, v, k, t);
  const VectorXc ha = spec.apply(a);
  const VectorXc hb = spec.apply(b);
  // Tr(rho_j rho_k H) - Tr(rho_j H rho_k) with rho = |a><a|, |b><b|.
  const Complex ab = a.dot(b);  // <a|b>
  return ab * hb.dot(a) - a.dot(hb) * std::conj(ab);
}

double exact_second_derivative(const SpectralDecomposition& spec, const StateVector& v, int j,
                               int k, double t) {
  check_dims(spec, v);
  check_powers(j, k);
  if (j == k) return 0.0;
  const VectorXc a = backward(spec, v, j, t);
  const VectorXc b = backward(spec, v, k, t);
  const VectorXc ha = spec.apply(a);
  const VectorXc hb = spec.apply(b);
  // Tr([H,|a><a|][H,|b><b|])
  //   = 2 <a|H|b><b|H|a> - <a|b><Hb|Ha> - <Ha|Hb><b|a>
  const Complex a_h_b = a.dot(hb);
  const Complex ab = a.dot(b);
  const Complex trace = 2.0 * a_h_b * std::conj(a_h_b) - ab * hb.dot(ha) - ha.dot(hb) * std::conj(ab);
  const double gap = static_cast<double>(j - k);
  return gap * gap * trace.real();
}

RecoverySignal::RecoverySignal(const SpectralDecomposition& spec, const StateVector& v, int j,
                               int k)
    : gap_(k - j) {
  check_dims(spec, v);
  check_powers(j, k);
  const VectorXc coeffs = spec.eigenvectors().adjoint() * v.amplitudes();
  weights_ = coeffs.cwiseAbs2();
  // R is invariant under a constant energy shift; centring on <H> keeps the
  // derivative sums well scaled.
  const double mean = weights_.dot(spec.eigenvalues()) / weights_.sum();
  eigenvalues_ = spec.eigenvalues().array() - mean;
}

double RecoverySignal::derivative(double t, int order) const {
  if (order < 0) throw Error(ErrorCode::InvalidArgument, "derivative order must be >= 0");
  if (gap_ == 0) return order == 0 ? 1.0 : 0.0;
  const double d = static_cast<double>(gap_);
  // c^{(p)}(t) = sum_a w_a (-i lambda_a d)^p exp(-i lambda_a d t)
  std::vector<Complex> c(static_cast<std::size_t>(order) + 1, Complex{0.0});
  for (Eigen::Index a = 0; a < weights_.size(); ++a) {
    const Complex rate = -kI * eigenvalues_(a) * d;
    Complex term = weights_(a) * std::exp(rate * t);
    for (int p = 0; p <= order; ++p) {
      c[static_cast<std::size_t>(p)] += term;
      term *= rate;
    }
  }
  // Leibniz rule on R = c conj(c).
  double total = 0.0;
  double binom = 1.0;
  for (int p = 0; p <= order; ++p) {
    total += binom * (c[static_cast<std::size_t>(p)] *
                      std::conj(c[static_cast<std::size_t>(order - p)]))
                         .real();
    binom = binom * static_cast<double>(order - p) / static_cast<double>(p + 1);
  }
  return total;
}

double RecoverySignal::energy_variance() const {
  const double mean = weights_.dot(eigenvalues_);
  return weights_.dot(eigenvalues_.cwiseAbs2()) - mean * mean;
}

StateVector build_initial_state(const SpectralDecomposition& spec, double gamma0,
                                std::uint64_t phase_seed) {
  if (!(gamma0 > 0.0) || gamma0 > 0.5)
    throw Error(ErrorCode::OverlapOutOfRange, "gamma0 must lie in (0, 0.5]");
  const Eigen::Index n = spec.dim();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "need at least two eigenvectors");

  VectorXc alpha = VectorXc::Zero(n);
  if (n == 2) {
    // No interior eigenvectors: split unevenly so that |a0|^2 + |a1|^2 = 1 and a0 a1 = gamma0.
    const double a0 = std::sqrt(0.5 * (1.0 + std::sqrt(1.0 - 4.0 * gamma0 * gamma0)));
    alpha(0) = a0;
    alpha(1) = gamma0 / a0;
  } else {
    alpha(0) = std::sqrt(gamma0);
    alpha(n - 1) = std::sqrt(gamma0);
    const double residual = std::max(0.0, 1.0 - 2.0 * gamma0);
    if (residual > 0.0) {
      const double magnitude = std::sqrt(residual / static_cast<double>(n - 2));
      Rng rng(phase_seed);
      for (Eigen::Index a = 1; a + 1 < n; ++a)
        alpha(a) = std::polar(magnitude, 2.0 * std::numbers::pi * rng.uniform());
    }
  }
  return StateVector::normalized(spec.eigenvectors() * alpha);
}

MatrixXc vectorized_commutator_matrix(const pauli::HermitianMatrix& h) {
  const Eigen::Index n = h.dim();
  if (n > 16) throw Error(ErrorCode::DimensionCap, "vectorized commutator limited to N <= 16");
  const MatrixXc& m = h.entries();
  const Eigen::Index n2 = n * n;
  MatrixXc out = MatrixXc::Zero(n2, n2);
  // (I (x) H)_{(a,i),(b,j)} = delta_ab H_ij ; (conj(H) (x) I)_{(a,i),(b,j)} = conj(H_ab) delta_ij
  for (Eigen::Index a = 0; a < n; ++a) {
    out.block(a * n, a * n, n, n) += m;
    for (Eigen::Index b = 0; b < n; ++b) {
      const Complex c = std::conj(m(a, b));
      for (Eigen::Index i = 0; i < n; ++i) out(a * n + i, b * n + i) -= c;
    }
  }
  return out;
}

}  // namespace superkrylov::spectral
