#pragma once

#include <Eigen/Dense>

#include "divstab/errors.hpp"

namespace divstab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Spectrum {
  Eigen::VectorXcd values;
  double max_real_part = 0.0;
};

/// Eigenvalues of a real square matrix. Complex pairs come out conjugate.
Spectrum eigenvalues(const Eigen::Ref<const Matrix>& A);

/// True iff P is symmetric and every Cholesky pivot exceeds tol. A
/// non-symmetric argument is simply not positive definite here, not an error.
bool is_positive_definite(const Eigen::Ref<const Matrix>& P, double tol = 1e-9);

/// Max-norm symmetry test relative to the matrix scale.
bool is_symmetric(const Eigen::Ref<const Matrix>& M, double rel_tol = 1e-12);

/// Solves A' P + P A = -Q for symmetric P through the Kronecker-vectorized
/// n^2 linear system. Throws when the spectrum of A makes the system singular
/// (eigenvalue pair with lambda_i + lambda_j == 0) or when the residual
/// exceeds 1e-9 * max(1, |Q|_max). The result is symmetrized.
Matrix solve_lyapunov(const Eigen::Ref<const Matrix>& A,
                      const Eigen::Ref<const Matrix>& Q);

}  // namespace divstab
