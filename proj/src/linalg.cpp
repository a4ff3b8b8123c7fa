#include "divstab/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>
#include <string>

namespace divstab {

namespace {

void require_square(const Eigen::Ref<const Matrix>& A, const char* who) {
  if (A.rows() != A.cols() || A.rows() < 1)
    throw DimensionError(std::string(who) + " needs a nonempty square matrix");
}

}  // namespace

Spectrum eigenvalues(const Eigen::Ref<const Matrix>& A) {
  require_square(A, "eigenvalues");
  Eigen::EigenSolver<Matrix> solver(A, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw Error("eigenvalue iteration failed to converge");
  Spectrum s;
  s.values = solver.eigenvalues();
  s.max_real_part = s.values.real().maxCoeff();
  return s;
}

bool is_symmetric(const Eigen::Ref<const Matrix>& M, double rel_tol) {
  if (M.rows() != M.cols()) return false;
  const double scale = M.cwiseAbs().maxCoeff();
  return (M - M.transpose()).cwiseAbs().maxCoeff() <= rel_tol * (1.0 + scale);
}

bool is_positive_definite(const Eigen::Ref<const Matrix>& P, double tol) {
  if (P.rows() != P.cols() || P.rows() < 1) return false;
  if (!is_symmetric(P)) return false;
  // Unpivoted Cholesky, aborting on the first pivot at or below tol.
  const int n = static_cast<int>(P.rows());
  Matrix L = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    double pivot = P(k, k);
    for (int j = 0; j < k; ++j) pivot -= L(k, j) * L(k, j);
    if (!(pivot > tol)) return false;
    L(k, k) = std::sqrt(pivot);
    for (int i = k + 1; i < n; ++i) {
      double v = P(i, k);
      for (int j = 0; j < k; ++j) v -= L(i, j) * L(k, j);
      L(i, k) = v / L(k, k);
    }
  }
  return true;
}

Matrix solve_lyapunov(const Eigen::Ref<const Matrix>& A,
                      const Eigen::Ref<const Matrix>& Q) {
  require_square(A, "solve_lyapunov");
  if (Q.rows() != A.rows() || Q.cols() != A.cols())
    throw DimensionError("solve_lyapunov needs Q with the shape of A");
  const int n = static_cast<int>(A.rows());
  const Matrix At = A.transpose();

  // vec(A'P) = (I kron A') vec(P), vec(PA) = (A' kron I) vec(P)
  Matrix M = Matrix::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    M.block(i * n, i * n, n, n) = At;
  for (int bi = 0; bi < n; ++bi)
    for (int bj = 0; bj < n; ++bj)
      M.block(bi * n, bj * n, n, n).diagonal().array() += At(bi, bj);

  Vector rhs(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) rhs(j * n + i) = -Q(i, j);

  Eigen::FullPivLU<Matrix> lu(M);
  if (!lu.isInvertible())
    throw Error("Lyapunov system is singular (eigenvalue pair summing to zero)");
  const Vector p = lu.solve(rhs);

  Matrix P(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) P(i, j) = p(j * n + i);
  P = ((P + P.transpose()) / 2.0).eval();

  // Backward-error check: the achievable residual scales with |A||P| + |Q|,
  // not with |Q| alone, so the bound has to as well.
  const double scale = 2.0 * A.cwiseAbs().maxCoeff() * P.cwiseAbs().maxCoeff() +
                       Q.cwiseAbs().maxCoeff();
  const Matrix residual = At * P + P * A + Q;
  if (residual.cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, scale))
    throw Error("Lyapunov solve residual exceeds tolerance");
  return P;
}

}  // namespace divstab
