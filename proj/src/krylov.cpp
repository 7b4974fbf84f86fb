#include "superkrylov/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "superkrylov/error.hpp"

namespace superkrylov::krylov {

std::string to_string(PairSource s) { return s == PairSource::Exact ? "exact" : "minimax"; }

KrylovPair assemble_pair_exact(const spectral::SpectralDecomposition& spec,
                               const spectral::StateVector& v, int m, double t_star) {
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "Krylov dimension must be >= 2");
  KrylovPair pair{m, t_star, MatrixXc::Identity(m, m), MatrixXc::Zero(m, m), PairSource::Exact,
                  std::nullopt};
  for (int j = 0; j < m; ++j)
    for (int k = j + 1; k < m; ++k) {
      const double r = spectral::recovery_probability(spec, v, j, k, t_star);
      const Complex jk = spectral::exact_J_entry(spec, v, j, k, t_star);
      pair.R_hat(j, k) = r;
      pair.R_hat(k, j) = r;
      pair.J_hat(j, k) = jk;
      pair.J_hat(k, j) = std::conj(jk);
    }
  return pair;
}

KrylovPair assemble_pair_minimax(const FitMap& fits, int m, double t_star, bool by_gap) {
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "Krylov dimension must be >= 2");
  KrylovPair pair{m, t_star, MatrixXc::Identity(m, m), MatrixXc::Zero(m, m),
                  PairSource::Minimax, std::nullopt};
  for (int j = 0; j < m; ++j)
    for (int k = j + 1; k < m; ++k) {
      const auto key = by_gap ? std::make_pair(0, k - j) : std::make_pair(j, k);
      const auto it = fits.find(key);
      if (it == fits.end())
        throw Error(ErrorCode::MissingFit, "no fit for pair (" + std::to_string(key.first) + "," +
                                               std::to_string(key.second) + ")");
      const double r = std::clamp(minimax::evaluate_x0(it->second, t_star), 0.0, 1.0);
      // dR/dt = i (j - k) J_jk
      const Complex jk = minimax::evaluate_x1(it->second, t_star) / (kI * double(j - k));
      pair.R_hat(j, k) = r;
      pair.R_hat(k, j) = r;
      pair.J_hat(j, k) = jk;
      pair.J_hat(k, j) = std::conj(jk);
    }
  // Already Hermitian by construction; folding removes any rounding asymmetry.
  pair.J_hat = 0.5 * (pair.J_hat + pair.J_hat.adjoint()).eval();
  pair.J_hat.diagonal().setZero();
  return pair;
}

RitzResult threshold_solve(const KrylovPair& pair, double eps) {
  if (!(eps >= 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be >= 0");
  if (pair.R_hat.rows() != pair.m || pair.J_hat.rows() != pair.m)
    throw Error(ErrorCode::DimensionMismatch, "pair matrices do not match m");

  Eigen::SelfAdjointEigenSolver<MatrixXc> gram(pair.R_hat);
  if (gram.info() != Eigen::Success)
    throw Error(ErrorCode::ConvergenceFailure, "Gram eigensolver did not converge");
  const VectorXr& sigma = gram.eigenvalues();

  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > eps) kept.push_back(i);
  if (kept.empty())
    throw Error(ErrorCode::AllModesThresholded,
                "threshold removes every Gram eigendirection (eps >= max eigenvalue)");

  MatrixXc W(pair.m, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c)
    W.col(static_cast<Eigen::Index>(c)) =
        gram.eigenvectors().col(kept[c]) / std::sqrt(sigma(kept[c]));

  MatrixXc reduced = W.adjoint() * pair.J_hat * W;
  reduced = 0.5 * (reduced + reduced.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXc> ritz(reduced, Eigen::EigenvaluesOnly);
  if (ritz.info() != Eigen::Success)
    throw Error(ErrorCode::ConvergenceFailure, "reduced eigensolver did not converge");
  return RitzResult{ritz.eigenvalues(), static_cast<int>(kept.size()), eps};
}

double ground_energy(const RitzResult& result, pauli::HamiltonianClass class_tag,
                     std::optional<double> top_energy) {
  switch (class_tag) {
    case pauli::HamiltonianClass::Class1KnownTop:
      if (!top_energy) throw Error(ErrorCode::MissingTopEnergy, "class 1 needs lambda_{N-1}");
      return result.ground_gap() + *top_energy;
    case pauli::HamiltonianClass::Class2Symmetric:
      return 0.5 * result.ground_gap();
    case pauli::HamiltonianClass::Generic:
      if (top_energy) return result.ground_gap() + *top_energy;
      throw Error(ErrorCode::MissingTopEnergy, "generic Hamiltonian needs lambda_{N-1}");
  }
  throw Error(ErrorCode::InvalidArgument, "unknown Hamiltonian class");
}

double choose_timestep(double spectral_width) {
  if (!(std::abs(spectral_width) > 0.0))
    throw Error(ErrorCode::ZeroWidth, "spectral width is zero (H proportional to identity)");
  return std::numbers::pi / std::abs(spectral_width);
}

namespace {

double spectral_norm(const MatrixXc& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixXc> svd(a);
  return svd.singularValues()(0);
}

}  // namespace

double noise_rate(const KrylovPair& estimated, const KrylovPair& exact, double j_norm) {
  if (estimated.m != exact.m || estimated.R_hat.rows() != exact.R_hat.rows())
    throw Error(ErrorCode::DimensionMismatch, "pairs have different Krylov dimension");
  if (!(j_norm > 0.0)) throw Error(ErrorCode::InvalidArgument, "||J||_2 must be positive");
  return spectral_norm(estimated.R_hat - exact.R_hat) +
         spectral_norm(estimated.J_hat - exact.J_hat) / j_norm;
}

}  // namespace superkrylov::krylov
