#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "superkrylov/spectral.hpp"
#include "checks.hpp"
#include "toy.hpp"

using namespace superkrylov;
using namespace superkrylov::spectral;
using superkrylov::testing::expect_error;
using superkrylov::testing::random_state;
using superkrylov::testing::ToyProblem;

namespace {

// Oracle: e^{-iHt} from the dense matrix exponential, independent of the
// library's eigendecomposition path.
MatrixXc propagator(const MatrixXc& h, double t) { return (MatrixXc(-kI * t * h)).exp(); }

MatrixXc density(const VectorXc& x) { return x * x.adjoint(); }

// rho_j(t) = U^{-j} |v><v| U^j
MatrixXc rho(const MatrixXc& h, const VectorXc& v, int j, double t) {
  return density(propagator(h, -j * t) * v);
}

}  // namespace

TEST(Spectral, DiagonalMatrix) {
  const pauli::HermitianMatrix h((MatrixXc(2, 2) << 1, 0, 0, -1).finished());
  const auto spec = eigendecompose(h);
  EXPECT_DOUBLE_EQ(spec.eigenvalues()(0), -1.0);
  EXPECT_DOUBLE_EQ(spec.eigenvalues()(1), 1.0);
  const MatrixXc expected = (MatrixXc(2, 2) << 0, 1, 1, 0).finished();
  EXPECT_LT((spec.eigenvectors() - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Spectral, HeisenbergPair) {
  const auto spec = eigendecompose(pauli::assemble_dense(pauli::build_heisenberg(2, {{{0, 1}, 1.0}})));
  EXPECT_NEAR(spec.lowest(), -3.0, 1e-12);
  for (int i = 1; i < 4; ++i) EXPECT_NEAR(spec.eigenvalues()(i), 1.0, 1e-12);
}

TEST(Spectral, RandomReconstructionAndPhase) {
  const auto h = pauli::random_hermitian(16, 3);
  const auto spec = eigendecompose(h);
  const MatrixXc& U = spec.eigenvectors();
  EXPECT_LT((U.adjoint() * U - MatrixXc::Identity(16, 16)).cwiseAbs().maxCoeff(), 1e-10);
  const MatrixXc recon = U * spec.eigenvalues().cast<Complex>().asDiagonal() * U.adjoint();
  EXPECT_LT((recon - h.entries()).cwiseAbs().maxCoeff(), 1e-10);
  for (Eigen::Index i = 1; i < 16; ++i) EXPECT_LE(spec.eigenvalues()(i - 1), spec.eigenvalues()(i));
  for (Eigen::Index c = 0; c < 16; ++c) {
    Eigen::Index arg = 0;
    U.col(c).cwiseAbs().maxCoeff(&arg);
    EXPECT_EQ(U(arg, c).imag(), 0.0);
    EXPECT_GT(U(arg, c).real(), 0.0);
  }
}

TEST(Spectral, EvolveBasics) {
  const ToyProblem toy;
  const auto same = evolve(toy.spec, toy.v, 0.0);
  EXPECT_LT((same.amplitudes() - toy.v.amplitudes()).norm(), 1e-15);

  const StateVector zero((VectorXc(2) << 1, 0).finished());
  const auto phased = evolve(toy.spec, zero, 0.7);
  EXPECT_NEAR(std::abs(phased.amplitudes()(0) - std::exp(-kI * 0.7)), 0.0, 1e-15);

  const auto h = pauli::random_hermitian(12, 9);
  const auto spec = eigendecompose(h);
  const auto v = random_state(12, 4);
  const auto there = evolve(spec, v, 1.3);
  EXPECT_LT((there.amplitudes() - propagator(h.entries(), 1.3) * v.amplitudes()).norm(), 1e-12);
  const auto back = evolve(spec, there, -1.3);
  EXPECT_LT((back.amplitudes() - v.amplitudes()).norm(), 1e-12);

  expect_error(ErrorCode::DimensionMismatch, [&] { evolve(spec, toy.v, 1.0); });
}

TEST(Spectral, StateVectorNormCheck) {
  expect_error(ErrorCode::InvalidArgument, [] { StateVector((VectorXc(2) << 1, 1).finished()); });
  expect_error(ErrorCode::InvalidArgument, [] { StateVector::normalized(VectorXc::Zero(3)); });
}

TEST(Spectral, RecoveryToyClosedForm) {
  const ToyProblem toy;
  for (double t = 0.0; t <= 1.0; t += 0.05) {
    EXPECT_NEAR(recovery_probability(toy.spec, toy.v, 0, 1, t), std::cos(t) * std::cos(t), 1e-12);
    EXPECT_EQ(recovery_probability(toy.spec, toy.v, 2, 2, t), 1.0);
  }
  EXPECT_NEAR(recovery_probability(toy.spec, toy.v, 1, 4, 0.0), 1.0, 1e-15);
}

TEST(Spectral, RecoveryMatchesDensityTrace) {
  const auto h = pauli::random_hermitian(8, 11);
  const auto spec = eigendecompose(h);
  const auto v = random_state(8, 12);
  for (auto [j, k, t] : {std::tuple{0, 1, 0.3}, {1, 3, 0.8}, {2, 0, 1.7}, {4, 2, 0.05}}) {
    const double oracle =
        (rho(h.entries(), v.amplitudes(), j, t) * rho(h.entries(), v.amplitudes(), k, t))
            .trace()
            .real();
    const double r = recovery_probability(spec, v, j, k, t);
    EXPECT_NEAR(r, oracle, 1e-12);
    EXPECT_NEAR(r, recovery_probability(spec, v, k, j, t), 1e-14);
    // Only the gap k - j matters.
    EXPECT_NEAR(r, recovery_probability(spec, v, 0, std::abs(k - j), t), 1e-12);
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, 1.0);
  }
  expect_error(ErrorCode::InvalidArgument, [&] { recovery_probability(spec, v, -1, 2, 0.1); });
}

TEST(Spectral, JEntryToyAndZero) {
  const ToyProblem toy;
  for (double t = 0.0; t <= 1.0; t += 0.1) {
    const Complex jk = exact_J_entry(toy.spec, toy.v, 0, 1, t);
    EXPECT_NEAR((kI * (0.0 - 1.0) * jk).real(), -std::sin(2 * t), 1e-12);
    EXPECT_NEAR((kI * (0.0 - 1.0) * jk).imag(), 0.0, 1e-12);
    EXPECT_EQ(exact_J_entry(toy.spec, toy.v, 1, 1, t), Complex(0.0));
  }
  EXPECT_NEAR(std::abs(exact_J_entry(toy.spec, toy.v, 0, 3, 0.0)), 0.0, 1e-15);
}

TEST(Spectral, JEntryMatchesDensityOracleAndSymmetry) {
  const auto h = pauli::random_hermitian(6, 21);
  const auto spec = eigendecompose(h);
  const auto v = random_state(6, 22);
  for (auto [j, k, t] : {std::tuple{0, 1, 0.4}, {1, 3, 0.9}, {3, 0, 0.2}}) {
    const MatrixXc rj = rho(h.entries(), v.amplitudes(), j, t);
    const MatrixXc rk = rho(h.entries(), v.amplitudes(), k, t);
    const Complex oracle = (rj * (rk * h.entries() - h.entries() * rk)).trace();
    const Complex jk = exact_J_entry(spec, v, j, k, t);
    EXPECT_NEAR(std::abs(jk - oracle), 0.0, 1e-12);
    const Complex kj = exact_J_entry(spec, v, k, j, t);
    EXPECT_NEAR(jk.real(), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(jk + kj), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(jk - std::conj(kj)), 0.0, 1e-12);
  }
}

TEST(Spectral, DerivativeIdentityFiniteDifference) {
  const auto h = pauli::random_hermitian(10, 5);
  const auto spec = eigendecompose(h);
  const auto v = random_state(10, 6);
  const double step = 1e-5;
  for (auto [j, k, t] : {std::tuple{0, 1, 0.3}, {2, 5, 0.6}, {4, 1, 1.1}}) {
    const double fd = (recovery_probability(spec, v, j, k, t + step) -
                       recovery_probability(spec, v, j, k, t - step)) /
                      (2 * step);
    const Complex rhs = kI * double(j - k) * exact_J_entry(spec, v, j, k, t);
    EXPECT_NEAR(rhs.imag(), 0.0, 1e-12);
    EXPECT_NEAR(fd, rhs.real(), 1e-5 * std::max(1.0, std::abs(fd)));
  }
}

TEST(Spectral, SecondDerivative) {
  const ToyProblem toy;
  for (double t = 0.0; t <= 1.0; t += 0.1)
    EXPECT_NEAR(exact_second_derivative(toy.spec, toy.v, 0, 1, t), -2.0 * std::cos(2 * t), 1e-12);
  EXPECT_EQ(exact_second_derivative(toy.spec, toy.v, 1, 1, 0.4), 0.0);

  const auto h = pauli::random_hermitian(10, 15);
  const auto spec = eigendecompose(h);
  const auto v = random_state(10, 16);
  const double step = 1e-4;
  for (auto [j, k, t] : {std::tuple{0, 1, 0.3}, {1, 4, 0.7}}) {
    const double fd = (recovery_probability(spec, v, j, k, t + step) -
                       2 * recovery_probability(spec, v, j, k, t) +
                       recovery_probability(spec, v, j, k, t - step)) /
                      (step * step);
    const double exact = exact_second_derivative(spec, v, j, k, t);
    EXPECT_NEAR(fd, exact, 1e-5 * std::max(1.0, std::abs(exact)));
  }
  // t = 0: (j - k)^2 Tr([H, rho]^2) = -2 (j - k)^2 Var_v(H)
  const RecoverySignal signal(spec, v, 1, 4);
  EXPECT_NEAR(exact_second_derivative(spec, v, 1, 4, 0.0), -2.0 * 9.0 * signal.energy_variance(),
              1e-10);
}

TEST(Spectral, RecoverySignalDerivatives) {
  const auto h = pauli::random_hermitian(12, 31);
  const auto spec = eigendecompose(h);
  const auto v = random_state(12, 32);
  const RecoverySignal signal(spec, v, 1, 3);
  EXPECT_EQ(signal.gap(), 2);
  for (double t : {0.0, 0.25, 0.9}) {
    EXPECT_NEAR(signal.value(t), recovery_probability(spec, v, 1, 3, t), 1e-12);
    const Complex dr = kI * (1.0 - 3.0) * exact_J_entry(spec, v, 1, 3, t);
    EXPECT_NEAR(signal.derivative(t, 1), dr.real(), 1e-10);
    EXPECT_NEAR(signal.derivative(t, 2), exact_second_derivative(spec, v, 1, 3, t), 1e-9);
    // Third and fourth derivatives against central differences of the lower ones.
    const double step = 1e-5;
    for (int order : {3, 4}) {
      const double fd =
          (signal.derivative(t + step, order - 1) - signal.derivative(t - step, order - 1)) /
          (2 * step);
      EXPECT_NEAR(signal.derivative(t, order), fd, 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
  EXPECT_NEAR(signal.derivative(0.0, 1), 0.0, 1e-12);
  const RecoverySignal diag(spec, v, 2, 2);
  EXPECT_EQ(diag.value(0.3), 1.0);
  EXPECT_EQ(diag.derivative(0.3, 2), 0.0);
}

TEST(Spectral, InitialStateOverlap) {
  const auto spec = eigendecompose(pauli::random_hermitian(16, 41));
  const MatrixXc& U = spec.eigenvectors();

  const auto half = build_initial_state(spec, 0.5);
  const VectorXc expected = (U.col(0) + U.col(15)) / std::sqrt(2.0);
  EXPECT_LT((half.amplitudes() - expected).norm(), 1e-12);

  const auto quarter = build_initial_state(spec, 0.25);
  const VectorXc alpha = U.adjoint() * quarter.amplitudes();
  EXPECT_NEAR(std::abs(alpha(0)), 0.5, 1e-12);
  EXPECT_NEAR(std::abs(alpha(15)), 0.5, 1e-12);
  EXPECT_NEAR(std::abs(std::conj(alpha(15)) * alpha(0) - 0.25), 0.0, 1e-12);
  EXPECT_NEAR(alpha.segment(1, 14).squaredNorm(), 0.5, 1e-12);

  expect_error(ErrorCode::OverlapOutOfRange, [&] { build_initial_state(spec, 0.0); });
  expect_error(ErrorCode::OverlapOutOfRange, [&] { build_initial_state(spec, 0.51); });

  const ToyProblem toy;
  const auto two = build_initial_state(toy.spec, 0.3);
  const VectorXc a2 = toy.spec.eigenvectors().adjoint() * two.amplitudes();
  EXPECT_NEAR((std::conj(a2(1)) * a2(0)).real(), 0.3, 1e-12);
}

TEST(Spectral, VectorizedCommutatorSmallCases) {
  const pauli::HermitianMatrix d((MatrixXc(2, 2) << 0, 0, 0, 1).finished());
  const VectorXr ev = Eigen::SelfAdjointEigenSolver<MatrixXc>(vectorized_commutator_matrix(d))
                          .eigenvalues();
  EXPECT_NEAR(ev(0), -1.0, 1e-12);
  EXPECT_NEAR(ev(1), 0.0, 1e-12);
  EXPECT_NEAR(ev(2), 0.0, 1e-12);
  EXPECT_NEAR(ev(3), 1.0, 1e-12);

  const pauli::HermitianMatrix id(MatrixXc::Identity(3, 3));
  EXPECT_EQ(vectorized_commutator_matrix(id).cwiseAbs().maxCoeff(), 0.0);

  expect_error(ErrorCode::DimensionCap,
               [] { vectorized_commutator_matrix(pauli::random_hermitian(17, 1)); });
}

TEST(Spectral, VectorizedCommutatorMatchesKron) {
  const auto h = pauli::random_hermitian(4, 51);
  const MatrixXc H = h.entries();
  const MatrixXc I = MatrixXc::Identity(4, 4);
  const MatrixXc oracle =
      Eigen::kroneckerProduct(I, H).eval() - Eigen::kroneckerProduct(MatrixXc(H.conjugate()), I).eval();
  EXPECT_LT((vectorized_commutator_matrix(h) - oracle).cwiseAbs().maxCoeff(), 1e-14);

  // vec(C_H(X)) = J vec(X), column stacking.
  MatrixXc X = MatrixXc::Random(4, 4);
  const MatrixXc C = H * X - X * H;
  const VectorXc lhs = vectorized_commutator_matrix(h) * Eigen::Map<VectorXc>(X.data(), 16);
  EXPECT_LT((lhs - Eigen::Map<const VectorXc>(C.data(), 16)).norm(), 1e-12);
}
