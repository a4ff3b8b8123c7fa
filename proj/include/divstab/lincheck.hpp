#pragma once

#include <optional>

#include "divstab/linalg.hpp"

namespace divstab {

/// The four matrix inequalities handled here, each on symmetric P:
///   RantzerEq7:  A'P + PA - (1/alpha) tr(A) P < 0   (the literal published
///                form; satisfiable by unstable A, see the unsoundness flag)
///   Eq07:        A'P + PA + (1/alpha) tr(A) P < 0
///   Theorem7:    A'P + PA - kappa tr(A) P < 0, and tr(A) <= 0 when kappa > 0
///   Corollary1:  A'P + PA + gamma P < 0
enum class ConditionMode { RantzerEq7, Eq07, Theorem7, Corollary1 };
const char* to_string(ConditionMode m);

struct LinearCondition {
  ConditionMode mode = ConditionMode::Corollary1;
  double parameter = 1.0;  // alpha, kappa or gamma depending on the mode

  static LinearCondition rantzer_eq7(double alpha);
  static LinearCondition eq07(double alpha);
  static LinearCondition theorem7(double kappa);
  static LinearCondition corollary1(double gamma);
};

enum class TriStatus { SatisfiedStrict, Boundary, Violated };
const char* to_string(TriStatus s);

/// Classification of the slack matrix by its extreme eigenvalues m:
/// m_max < -tol strict, |m_max| <= tol boundary, otherwise violated, with
/// tol = 1e-9 * (1 + |slack|_max).
struct TriState {
  TriStatus status = TriStatus::Violated;
  double max_eigenvalue = 0.0;
  double min_eigenvalue = 0.0;
  double tol = 0.0;
};

struct ConditionCheck {
  TriState tri;
  bool P_positive_definite = false;
  bool side_condition_ok = true;  // Theorem7 with kappa > 0: tr(A) <= 0
  Matrix slack;
};

/// Evaluates the slack of `cond` at (A, P). P must be symmetric.
ConditionCheck check_linear_condition(const Eigen::Ref<const Matrix>& A,
                                      const Eigen::Ref<const Matrix>& P,
                                      const LinearCondition& cond);

/// A shifted so that `cond` at (A, P) is the plain Lyapunov inequality at
/// (shifted, P): Theorem7 subtracts (kappa tr(A)/2) I, Corollary1 adds
/// (gamma/2) I.
Matrix shifted_matrix(const Eigen::Ref<const Matrix>& A,
                      const LinearCondition& cond);

/// Feasibility by spectral shift, for Theorem7 and Corollary1 only: the
/// condition has a solution iff the shifted matrix is Hurwitz, in which case
/// P solves the Lyapunov equation of the shifted matrix with Q = I. Returns
/// no P when infeasible; shifted_max_real tells the caller by how much.
struct CertificateSearch {
  std::optional<Matrix> P;
  double shifted_max_real = 0.0;
  bool side_condition_ok = true;
};

CertificateSearch find_certificate(const Eigen::Ref<const Matrix>& A,
                                   const LinearCondition& cond);

enum class Stability { Stable, Marginal, Unstable };
const char* to_string(Stability s);

/// Spectral ground truth: UNSTABLE if max Re lambda > tol, MARGINAL if it
/// lies within [-tol, tol], else STABLE.
Stability linear_ground_truth(const Eigen::Ref<const Matrix>& A,
                              double tol = 1e-9);

}  // namespace divstab
