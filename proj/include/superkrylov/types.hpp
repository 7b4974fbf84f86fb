#pragma once

#include <complex>

#include <Eigen/Dense>

namespace superkrylov {

using Complex = std::complex<double>;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;
using MatrixXr = Eigen::MatrixXd;
using VectorXr = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

// Largest |a_ij - conj(a_ji)|.
inline double hermiticity_defect(const MatrixXc& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace superkrylov
