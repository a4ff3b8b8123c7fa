#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "divstab/lincheck.hpp"

namespace divstab {

/// Controllability of (A, B) by the rank of [B AB ... A^(n-1)B].
bool is_controllable(const Eigen::Ref<const Matrix>& A,
                     const Eigen::Ref<const Matrix>& B);

struct SynthesisOptions {
  /// Closed-loop poles to place. Empty means -gamma/2 - 1 - j for j = 0..n-1,
  /// which clears the -gamma/2 line with room to spare.
  std::vector<double> target_poles;
  std::uint64_t seed = 1;
  int max_attempts = 32;
};

struct SynthesisResult {
  Matrix K;  // m x n state feedback, u = K x
  Matrix P;  // certificate for the Corollary1 condition at gamma
  Spectrum closed_loop;
  LinearCondition condition;
};

/// State feedback so that A + BK satisfies the Corollary1 inequality with the
/// given gamma > 0, with P recovered from the Lyapunov equation of the
/// shifted closed loop. Multi-input pairs are reduced to a single input
/// through a random combination vector; non-cyclic A gets a small random
/// preliminary gain first. Throws when (A, B) is uncontrollable or no attempt
/// produces a verified certificate. The result is always post-verified:
/// closed-loop spectrum strictly left of -gamma/2 and the condition check
/// SATISFIED_STRICT.
SynthesisResult synthesize_state_feedback(const Eigen::Ref<const Matrix>& A,
                                          const Eigen::Ref<const Matrix>& B,
                                          double gamma,
                                          const SynthesisOptions& opts = {});

struct ClosedLoopReport {
  Matrix closed_loop;  // A + B K
  Spectrum spectrum;
  Stability ground_truth = Stability::Unstable;
  std::optional<Matrix> P;  // the P that was checked (given or found)
  std::optional<ConditionCheck> check;
  bool certificate_searched = false;
  double shifted_max_real = 0.0;  // populated when a search ran
  /// The soundness alarm: a strictly satisfied inequality with positive
  /// definite P on a closed loop whose ground truth is UNSTABLE. Possible for
  /// the RantzerEq7 and Eq07 modes; never for Theorem7 or Corollary1.
  bool unsoundness_flag = false;
};

/// Evaluates `cond` on the closed loop A + BK. With a P given, checks it
/// directly; without one, runs find_certificate when the mode supports it and
/// checks the found P. Always reports the spectral ground truth and raises
/// unsoundness_flag on the combination documented above.
ClosedLoopReport verify_closed_loop(const Eigen::Ref<const Matrix>& A,
                                    const Eigen::Ref<const Matrix>& B,
                                    const Eigen::Ref<const Matrix>& K,
                                    const LinearCondition& cond,
                                    const std::optional<Matrix>& P = std::nullopt);

}  // namespace divstab
