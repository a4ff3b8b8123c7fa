#include "divstab/synth.hpp"

#include <Eigen/LU>
#include <cmath>

#include "divstab/rng.hpp"

namespace divstab {

namespace {

Matrix controllability_matrix(const Eigen::Ref<const Matrix>& A,
                              const Eigen::Ref<const Matrix>& B) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  Matrix C(n, n * m);
  Matrix block = B;
  for (int k = 0; k < n; ++k) {
    C.middleCols(k * m, m) = block;
    block = A * block;
  }
  return C;
}

/// Ackermann's formula for a single-input pair: k row vector with
/// eig(A - b k) at the given poles. Expects (A, b) controllable.
Eigen::RowVectorXd ackermann(const Eigen::Ref<const Matrix>& A,
                             const Eigen::Ref<const Vector>& b,
                             const std::vector<double>& poles) {
  const int n = static_cast<int>(A.rows());
  Matrix C(n, n);
  Vector col = b;
  for (int k = 0; k < n; ++k) {
    C.col(k) = col;
    col = A * col;
  }
  Eigen::FullPivLU<Matrix> lu(C);
  if (!lu.isInvertible())
    throw Error("controllability matrix is singular in the pole placement step");

  Matrix phi = Matrix::Identity(n, n);
  for (const double p : poles) phi *= A - p * Matrix::Identity(n, n);

  // k = e_n' C^-1 phi(A), via C' z = e_n
  Vector en = Vector::Zero(n);
  en(n - 1) = 1.0;
  const Vector z = Eigen::FullPivLU<Matrix>(C.transpose()).solve(en);
  return (z.transpose() * phi).eval();
}

}  // namespace

bool is_controllable(const Eigen::Ref<const Matrix>& A,
                     const Eigen::Ref<const Matrix>& B) {
  if (A.rows() != A.cols() || A.rows() < 1)
    throw DimensionError("controllability needs a square A");
  if (B.rows() != A.rows() || B.cols() < 1)
    throw DimensionError("B must have as many rows as A");
  Eigen::FullPivLU<Matrix> lu(controllability_matrix(A, B));
  return lu.rank() == A.rows();
}

SynthesisResult synthesize_state_feedback(const Eigen::Ref<const Matrix>& A,
                                          const Eigen::Ref<const Matrix>& B,
                                          double gamma,
                                          const SynthesisOptions& opts) {
  if (A.rows() != A.cols() || A.rows() < 1)
    throw DimensionError("synthesis needs a square A");
  if (B.rows() != A.rows() || B.cols() < 1)
    throw DimensionError("B must have as many rows as A");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (!is_controllable(A, B)) throw Error("the pair (A, B) is not controllable");

  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());

  std::vector<double> poles = opts.target_poles;
  if (poles.empty()) {
    for (int j = 0; j < n; ++j) poles.push_back(-gamma / 2.0 - 1.0 - j);
  }
  if (static_cast<int>(poles.size()) != n)
    throw ConfigError("need exactly one target pole per state");
  for (const double p : poles) {
    if (!(p < -gamma / 2.0))
      throw ConfigError("every target pole must lie strictly left of -gamma/2");
  }

  const LinearCondition cond = LinearCondition::corollary1(gamma);
  Rng rng(opts.seed);
  std::string last_failure = "no attempts were made";

  for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
    // A random combination vector reduces the multi-input problem to a
    // single-input one; a preliminary random gain (after the first attempt)
    // makes the combined pair cyclic when A alone is not.
    Matrix K0 = Matrix::Zero(m, n);
    if (attempt > 0) {
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) K0(i, j) = 0.5 * rng.next_gaussian();
    }
    Vector w(m);
    if (m == 1) {
      w(0) = 1.0;
    } else {
      for (int i = 0; i < m; ++i) w(i) = rng.next_gaussian();
      const double norm = w.norm();
      if (norm < 1e-12) continue;
      w /= norm;
    }

    const Matrix A_shift = A + B * K0;
    const Vector b = B * w;

    try {
      if (!is_controllable(A_shift, Matrix(b))) {
        last_failure = "combined single-input pair was not controllable";
        continue;
      }
      const Eigen::RowVectorXd k = ackermann(A_shift, b, poles);
      const Matrix K = K0 - w * k;
      const Matrix closed = A + B * K;

      const Spectrum spec = eigenvalues(closed);
      if (!(spec.max_real_part < -gamma / 2.0 - 1e-9)) {
        last_failure = "placed spectrum did not clear -gamma/2";
        continue;
      }
      const Matrix P =
          solve_lyapunov(shifted_matrix(closed, cond), Matrix::Identity(n, n));
      const ConditionCheck check = check_linear_condition(closed, P, cond);
      if (check.tri.status != TriStatus::SatisfiedStrict ||
          !check.P_positive_definite) {
        last_failure = "certificate re-check was not strict";
        continue;
      }

      SynthesisResult out;
      out.K = K;
      out.P = P;
      out.closed_loop = spec;
      out.condition = cond;
      return out;
    } catch (const Error& e) {
      last_failure = e.what();
    }
  }
  throw Error("state feedback synthesis failed: " + last_failure);
}

ClosedLoopReport verify_closed_loop(const Eigen::Ref<const Matrix>& A,
                                    const Eigen::Ref<const Matrix>& B,
                                    const Eigen::Ref<const Matrix>& K,
                                    const LinearCondition& cond,
                                    const std::optional<Matrix>& P) {
  if (A.rows() != A.cols() || A.rows() < 1)
    throw DimensionError("verification needs a square A");
  if (B.rows() != A.rows() || K.rows() != B.cols() || K.cols() != A.cols())
    throw DimensionError("B is n x m and K must be m x n");

  ClosedLoopReport out;
  out.closed_loop = A + B * K;
  out.spectrum = eigenvalues(out.closed_loop);
  out.ground_truth = linear_ground_truth(out.closed_loop);

  if (P) {
    out.P = P;
    out.check = check_linear_condition(out.closed_loop, *P, cond);
  } else if (cond.mode == ConditionMode::Theorem7 ||
             cond.mode == ConditionMode::Corollary1) {
    out.certificate_searched = true;
    const CertificateSearch search = find_certificate(out.closed_loop, cond);
    out.shifted_max_real = search.shifted_max_real;
    if (search.P) {
      out.P = search.P;
      out.check = check_linear_condition(out.closed_loop, *search.P, cond);
    }
  }

  out.unsoundness_flag = out.check.has_value() &&
                         out.check->tri.status == TriStatus::SatisfiedStrict &&
                         out.check->P_positive_definite &&
                         out.ground_truth == Stability::Unstable;
  return out;
}

}  // namespace divstab
