#pragma once

// Thin wrappers over the LAPACKE routines used by the library.

#include <Eigen/Dense>

namespace arraymem::lapack {

/// Right eigenvectors of a general complex matrix (zgeev). Returns LAPACK info.
int general_eigen(Eigen::MatrixXcd a, Eigen::VectorXcd& values, Eigen::MatrixXcd& vectors);

/// Largest `count` eigenpairs of a Hermitian matrix (zheevr, upper triangle),
/// ascending order. Returns LAPACK info.
int hermitian_top(Eigen::MatrixXcd a, int count, Eigen::VectorXd& values, Eigen::MatrixXcd& vectors);

} // namespace arraymem::lapack
