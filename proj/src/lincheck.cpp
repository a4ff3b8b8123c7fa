#include "divstab/lincheck.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace divstab {

const char* to_string(ConditionMode m) {
  switch (m) {
    case ConditionMode::RantzerEq7: return "rantzer-eq7";
    case ConditionMode::Eq07: return "eq07";
    case ConditionMode::Theorem7: return "theorem7";
    case ConditionMode::Corollary1: return "corollary1";
  }
  return "?";
}

const char* to_string(TriStatus s) {
  switch (s) {
    case TriStatus::SatisfiedStrict: return "SATISFIED_STRICT";
    case TriStatus::Boundary: return "BOUNDARY";
    case TriStatus::Violated: return "VIOLATED";
  }
  return "?";
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "STABLE";
    case Stability::Marginal: return "MARGINAL";
    case Stability::Unstable: return "UNSTABLE";
  }
  return "?";
}

LinearCondition LinearCondition::rantzer_eq7(double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  return {ConditionMode::RantzerEq7, alpha};
}

LinearCondition LinearCondition::eq07(double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  return {ConditionMode::Eq07, alpha};
}

LinearCondition LinearCondition::theorem7(double kappa) {
  if (!(kappa >= 0.0)) throw ConfigError("kappa must be nonnegative");
  return {ConditionMode::Theorem7, kappa};
}

LinearCondition LinearCondition::corollary1(double gamma) {
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  return {ConditionMode::Corollary1, gamma};
}

namespace {

double trace_coefficient(const LinearCondition& cond) {
  // Multiplier c in slack = A'P + PA + c * tr(A) * P (Corollary1 uses gamma
  // directly instead of the trace).
  switch (cond.mode) {
    case ConditionMode::RantzerEq7: return -1.0 / cond.parameter;
    case ConditionMode::Eq07: return 1.0 / cond.parameter;
    case ConditionMode::Theorem7: return -cond.parameter;
    case ConditionMode::Corollary1: return 0.0;
  }
  return 0.0;
}

}  // namespace

ConditionCheck check_linear_condition(const Eigen::Ref<const Matrix>& A,
                                      const Eigen::Ref<const Matrix>& P,
                                      const LinearCondition& cond) {
  if (A.rows() != A.cols() || A.rows() < 1)
    throw DimensionError("condition check needs a square A");
  if (P.rows() != A.rows() || P.cols() != A.cols())
    throw DimensionError("P must have the shape of A");
  if (!is_symmetric(P)) throw Error("P must be symmetric");

  ConditionCheck out;
  const double tr = A.trace();
  Matrix slack = A.transpose() * P + P * A;
  if (cond.mode == ConditionMode::Corollary1) {
    slack += cond.parameter * P;
  } else {
    slack += trace_coefficient(cond) * tr * P;
  }
  slack = ((slack + slack.transpose()) / 2.0).eval();
  out.slack = slack;

  Eigen::SelfAdjointEigenSolver<Matrix> es(slack);
  if (es.info() != Eigen::Success)
    throw Error("eigenvalue iteration failed on the slack matrix");
  const double m_max = es.eigenvalues().maxCoeff();
  const double m_min = es.eigenvalues().minCoeff();
  const double tol = 1e-9 * (1.0 + slack.cwiseAbs().maxCoeff());

  out.tri.max_eigenvalue = m_max;
  out.tri.min_eigenvalue = m_min;
  out.tri.tol = tol;
  if (m_max < -tol) {
    out.tri.status = TriStatus::SatisfiedStrict;
  } else if (std::abs(m_max) <= tol) {
    out.tri.status = TriStatus::Boundary;
  } else {
    out.tri.status = TriStatus::Violated;
  }

  out.P_positive_definite = is_positive_definite(P);
  out.side_condition_ok =
      !(cond.mode == ConditionMode::Theorem7 && cond.parameter > 0.0 && tr > 0.0);
  return out;
}

Matrix shifted_matrix(const Eigen::Ref<const Matrix>& A,
                      const LinearCondition& cond) {
  if (A.rows() != A.cols() || A.rows() < 1)
    throw DimensionError("shifted_matrix needs a square A");
  const int n = static_cast<int>(A.rows());
  switch (cond.mode) {
    case ConditionMode::Theorem7:
      return A - (cond.parameter * A.trace() / 2.0) * Matrix::Identity(n, n);
    case ConditionMode::Corollary1:
      return A + (cond.parameter / 2.0) * Matrix::Identity(n, n);
    case ConditionMode::RantzerEq7:
    case ConditionMode::Eq07:
      throw Error("no certificate search for this condition mode");
  }
  throw Error("no certificate search for this condition mode");
}

CertificateSearch find_certificate(const Eigen::Ref<const Matrix>& A,
                                   const LinearCondition& cond) {
  const Matrix shifted = shifted_matrix(A, cond);
  CertificateSearch out;
  out.shifted_max_real = eigenvalues(shifted).max_real_part;
  out.side_condition_ok =
      !(cond.mode == ConditionMode::Theorem7 && cond.parameter > 0.0 &&
        A.trace() > 0.0);
  if (out.shifted_max_real < 0.0) {
    const int n = static_cast<int>(A.rows());
    out.P = solve_lyapunov(shifted, Matrix::Identity(n, n));
  }
  return out;
}

Stability linear_ground_truth(const Eigen::Ref<const Matrix>& A, double tol) {
  const double m = eigenvalues(A).max_real_part;
  if (m > tol) return Stability::Unstable;
  if (m >= -tol) return Stability::Marginal;
  return Stability::Stable;
}

}  // namespace divstab
