#include <cmath>

#include "doctest.h"
#include "divstab/synth.hpp"
#include "divstab/rng.hpp"

using namespace divstab;

TEST_CASE("controllability rank test") {
  Matrix A(2, 2), B(2, 1);
  A << 0, 1, 0, 0;
  B << 0, 1;
  CHECK(is_controllable(A, B));
  B << 1, 0;  // the second integrator state is unreachable
  CHECK_FALSE(is_controllable(A, B));
  Matrix B2(2, 2);
  B2 << 1, 0, 0, 1;
  CHECK(is_controllable(A, B2));
}

TEST_CASE("pole placement on the benchmark pair lands exactly") {
  Matrix A(2, 2), B(2, 1);
  A << 0, 1, 1, 1;
  B << 0, 1;
  // Default poles for gamma = 1 are -1.5 and -2.5, which forces
  // K = [-4.75, -5]: char poly (s + 1.5)(s + 2.5) = s^2 + 4s + 3.75.
  const SynthesisResult r = synthesize_state_feedback(A, B, 1.0);
  CHECK(r.K(0, 0) == doctest::Approx(-4.75).epsilon(1e-9));
  CHECK(r.K(0, 1) == doctest::Approx(-5.0).epsilon(1e-9));
  CHECK(r.closed_loop.max_real_part == doctest::Approx(-1.5).epsilon(1e-9));
  CHECK(r.condition.mode == ConditionMode::Corollary1);
  CHECK(r.condition.parameter == 1.0);
  const Matrix closed = A + B * r.K;
  const ConditionCheck c = check_linear_condition(closed, r.P, r.condition);
  CHECK(c.tri.status == TriStatus::SatisfiedStrict);
  CHECK(c.P_positive_definite);
}

TEST_CASE("explicit target poles are honored") {
  Matrix A(2, 2), B(2, 1);
  A << 0, 1, 1, 1;
  B << 0, 1;
  SynthesisOptions opts;
  opts.target_poles = {-2.0, -3.0};
  const SynthesisResult r = synthesize_state_feedback(A, B, 1.0, opts);
  // (s+2)(s+3) = s^2 + 5s + 6; A+BK must carry that spectrum.
  const Spectrum s = eigenvalues(A + B * r.K);
  CHECK(s.max_real_part == doctest::Approx(-2.0).epsilon(1e-9));
}

TEST_CASE("poles that do not clear the decay line are rejected") {
  Matrix A(2, 2), B(2, 1);
  A << 0, 1, 1, 1;
  B << 0, 1;
  SynthesisOptions opts;
  opts.target_poles = {-0.4, -3.0};  // -0.4 is right of -gamma/2 = -0.5
  CHECK_THROWS_AS(synthesize_state_feedback(A, B, 1.0, opts), Error);
}

TEST_CASE("uncontrollable pairs are reported as such") {
  Matrix A(2, 2), B(2, 1);
  A << 1, 0, 0, 2;
  B << 1, 0;
  try {
    synthesize_state_feedback(A, B, 1.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("not controllable") != std::string::npos);
  }
}

TEST_CASE("multi input pairs go through the input combination") {
  Matrix A(3, 3), B(3, 2);
  A << 0, 1, 0, 0, 0, 1, 1, -2, 3;
  B << 0, 1, 1, 0, 0, 1;
  const SynthesisResult r = synthesize_state_feedback(A, B, 1.0);
  CHECK(r.K.rows() == 2);
  CHECK(r.K.cols() == 3);
  CHECK(r.closed_loop.max_real_part < -0.5);
  const ConditionCheck c =
      check_linear_condition(A + B * r.K, r.P, r.condition);
  CHECK(c.tri.status == TriStatus::SatisfiedStrict);
  CHECK(c.P_positive_definite);
}

TEST_CASE("closed loop verification with an explicit certificate") {
  Matrix A(2, 2), B(2, 1), K(1, 2);
  A << 0, 1, 1, 1;
  B << 0, 1;
  K << -4.75, -5;
  const Matrix shifted =
      (A + B * K) + 0.5 * Matrix::Identity(2, 2);
  const Matrix P = solve_lyapunov(shifted, Matrix::Identity(2, 2));
  const ClosedLoopReport r =
      verify_closed_loop(A, B, K, LinearCondition::corollary1(1.0), P);
  REQUIRE(r.check.has_value());
  CHECK(r.check->tri.status == TriStatus::SatisfiedStrict);
  CHECK(r.ground_truth == Stability::Stable);
  CHECK_FALSE(r.unsoundness_flag);
  CHECK_FALSE(r.certificate_searched);
}

TEST_CASE("closed loop verification can search for its own certificate") {
  Matrix A(2, 2), B(2, 1), K(1, 2);
  A << 0, 1, 1, 1;
  B << 0, 1;
  K << -4.75, -5;
  const ClosedLoopReport r =
      verify_closed_loop(A, B, K, LinearCondition::corollary1(1.0));
  CHECK(r.certificate_searched);
  REQUIRE(r.P.has_value());
  REQUIRE(r.check.has_value());
  CHECK(r.check->tri.status == TriStatus::SatisfiedStrict);
  CHECK_FALSE(r.unsoundness_flag);
}

TEST_CASE("the unsoundness flag singles out the broken combination") {
  Matrix A(2, 2), B(2, 1), K(1, 2), P(2, 2);
  A << 0, 1, 1, 1;
  B << 0, 1;
  K << -0.7082, -2.2651;
  P << 0.7712, 0.3508, 0.3508, 1.122;
  const ClosedLoopReport flagged =
      verify_closed_loop(A, B, K, LinearCondition::eq07(1.0), P);
  CHECK(flagged.unsoundness_flag);
  CHECK(flagged.ground_truth == Stability::Unstable);
  // The literal published form is simply violated here, so no flag.
  const ClosedLoopReport literal =
      verify_closed_loop(A, B, K, LinearCondition::rantzer_eq7(1.0), P);
  CHECK_FALSE(literal.unsoundness_flag);
  REQUIRE(literal.check.has_value());
  CHECK(literal.check->tri.status == TriStatus::Violated);
}

TEST_CASE("modes without a search and without P skip the check") {
  Matrix A(2, 2), B(2, 1), K(1, 2);
  A << 0, 1, 1, 1;
  B << 0, 1;
  K << -4.75, -5;
  const ClosedLoopReport r =
      verify_closed_loop(A, B, K, LinearCondition::eq07(1.0));
  CHECK_FALSE(r.check.has_value());
  CHECK_FALSE(r.certificate_searched);
  CHECK(r.ground_truth == Stability::Stable);
  CHECK_FALSE(r.unsoundness_flag);
}

TEST_CASE("random stabilizable pairs always come back verified") {
  Rng rng(61);
  int done = 0;
  while (done < 20) {
    const int n = 2 + static_cast<int>(rng.next_u01() * 3.0);
    Matrix A(n, n), B(n, 1);
    for (int i = 0; i < n; ++i) {
      B(i, 0) = rng.next_gaussian();
      for (int j = 0; j < n; ++j) A(i, j) = rng.next_gaussian();
    }
    if (!is_controllable(A, B)) continue;
    const SynthesisResult r = synthesize_state_feedback(A, B, 1.0, {});
    CHECK(eigenvalues(A + B * r.K).max_real_part < -0.5);
    CHECK(is_positive_definite(r.P));
    ++done;
  }
}
