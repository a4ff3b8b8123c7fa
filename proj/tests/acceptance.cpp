// Acceptance gate: eleven end to end checks over the whole toolbox, one
// PASS/FAIL line each, nonzero exit when anything fails. Each check builds
// its own inputs from scratch so a regression in one module cannot hide
// behind another.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "divstab/config.hpp"
#include "divstab/density.hpp"
#include "divstab/divcheck.hpp"
#include "divstab/expr.hpp"
#include "divstab/lincheck.hpp"
#include "divstab/linalg.hpp"
#include "divstab/sim.hpp"
#include "divstab/synth.hpp"

using namespace divstab;

namespace {

void expect(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error(msg);
}

void expect_near(double a, double b, double rel, const std::string& what) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  if (!(std::abs(a - b) <= rel * scale))
    throw std::runtime_error(what + ": " + std::to_string(a) + " vs " +
                             std::to_string(b));
}

// The four study fields, rebuilt from their defining expressions.
VectorField planar_cubic(double c) {
  const std::string f2 =
      (c > 0 ? std::string("-x1") : std::string("x1")) + " - x1^2*x2 - x2^3";
  return VectorField(2, {parse_expr("x2", 2), parse_expr(f2, 2)});
}

VectorField axis_growth() {
  return VectorField(2, {parse_expr("-x1", 2),
                         parse_expr("0.1*x2 - x1^2*x2", 2)});
}

VectorField two_equilibria() {
  return VectorField(2, {parse_expr("-x1 + x1^2 - x2^2", 2),
                         parse_expr("-x2 + 2*x1*x2", 2)});
}

VectorField plane_attractor() {
  return VectorField(3, {parse_expr("x2 - 2*x1*x3^2", 3),
                         parse_expr("-x1 - 2*x2*x3^2", 3),
                         parse_expr("-2*x3^3", 3)});
}

// Annulus sampler independent of the library sampler.
std::vector<Vector> annulus_points(int dim, int count, double r_lo,
                                   double r_hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> radius(r_lo, r_hi);
  std::vector<Vector> pts;
  pts.reserve(count);
  while (static_cast<int>(pts.size()) < count) {
    Vector d(dim);
    for (int i = 0; i < dim; ++i) d(i) = gauss(rng);
    const double n = d.norm();
    if (n < 1e-8) continue;
    pts.push_back(d * (radius(rng) / n));
  }
  return pts;
}

// Independent central difference divergence.
double fd_div(const VectorField& F, const Vector& x, double h) {
  double acc = 0.0;
  Vector p = x, m = x;
  for (int i = 0; i < F.dim; ++i) {
    p(i) = x(i) + h;
    m(i) = x(i) - h;
    acc += (F.components[i].eval(p) - F.components[i].eval(m)) / (2.0 * h);
    p(i) = x(i);
    m(i) = x(i);
  }
  return acc;
}

Vector vecn(std::initializer_list<double> vals) {
  Vector v(static_cast<int>(vals.size()));
  int i = 0;
  for (double a : vals) v(i++) = a;
  return v;
}

// ---------------------------------------------------------------------------

void check1_symbolic_divergence_oracles() {
  const auto t0 = std::chrono::steady_clock::now();
  struct Entry {
    const char* name;
    VectorField f;
  };
  const std::vector<Entry> fields = {
      {"planar-cubic c=1", planar_cubic(1.0)},
      {"planar-cubic c=-1", planar_cubic(-1.0)},
      {"axis-growth", axis_growth()},
      {"two-equilibria", two_equilibria()},
      {"plane-attractor", plane_attractor()},
  };
  const double h = 1e-6;
  int combo = 0;
  for (const Entry& e : fields) {
    for (int alpha = 1; alpha <= 3; ++alpha, ++combo) {
      const DensityFunction rho = norm_power_density(alpha, e.f.dim);
      const VectorField direct = scale_field(rho.rho, e.f);
      const VectorField recip = scale_field(rho.rho_inv, e.f);
      const Expr sym_direct = divergence(direct);
      const Expr sym_recip = divergence(recip);
      const auto pts =
          annulus_points(e.f.dim, 100, 0.8, 2.0, 1000 + 7 * combo);
      for (const Vector& x : pts) {
        expect_near(sym_direct.eval(x), fd_div(direct, x, h), 1e-6,
                    std::string(e.name) + " direct divergence vs fd");
        expect_near(sym_recip.eval(x), fd_div(recip, x, h), 1e-6,
                    std::string(e.name) + " reciprocal divergence vs fd");
      }
    }
  }

  // Closed forms, evaluated against the symbolic expressions to 1e-9.
  for (int alpha = 1; alpha <= 3; ++alpha) {
    const double a = alpha;
    const auto pts2 = annulus_points(2, 100, 0.8, 2.0, 5000 + alpha);
    const auto pts3 = annulus_points(3, 100, 0.8, 2.0, 6000 + alpha);

    for (const double c : {1.0, -1.0}) {
      const VectorField f = planar_cubic(c);
      const DensityFunction rho = norm_power_density(a, 2);
      const Expr sym = divergence(scale_field(rho.rho, f));
      for (const Vector& x : pts2) {
        const double n = x.squaredNorm();
        const double closed =
            2.0 * a * std::pow(n, a - 1.0) *
                (x(0) * x(1) - c * x(0) * x(1) - x(0) * x(0) * x(1) * x(1) -
                 std::pow(x(1), 4)) -
            (x(0) * x(0) + 3.0 * x(1) * x(1)) * std::pow(n, a);
        expect_near(sym.eval(x), closed, 1e-9, "planar-cubic closed form");
      }
    }
    {
      const double b = 0.1;
      const VectorField f = axis_growth();
      const DensityFunction rho = norm_power_density(a, 2);
      const Expr sym = divergence(scale_field(rho.rho, f));
      for (const Vector& x : pts2) {
        const double n = x.squaredNorm();
        const double x1s = x(0) * x(0), x2s = x(1) * x(1);
        const double closed =
            std::pow(n, a - 1.0) *
            ((-2.0 * a + b - 1.0) * x1s + (2.0 * a * b + b - 1.0) * x2s -
             2.0 * a * x1s * x2s - x1s * n);
        expect_near(sym.eval(x), closed, 1e-9, "axis-growth closed form");
      }
    }
    {
      const VectorField f = two_equilibria();
      const DensityFunction rho = norm_power_density(a, 2);
      const Expr sym = divergence(scale_field(rho.rho_inv, f));
      for (const Vector& x : pts2) {
        const double n = x.squaredNorm();
        const double closed =
            std::pow(n, -a) * (2.0 * a - 2.0 + 2.0 * x(0) * (2.0 - a));
        expect_near(sym.eval(x), closed, 1e-9, "two-equilibria closed form");
      }
    }
    {
      const VectorField f = plane_attractor();
      const DensityFunction rho = norm_power_density(a, 3);
      const Expr sym_direct = divergence(scale_field(rho.rho, f));
      const Expr sym_recip = divergence(scale_field(rho.rho_inv, f));
      const Expr sym_divf = divergence(f);
      for (const Vector& x : pts3) {
        const double n = x.squaredNorm();
        const double x3s = x(2) * x(2);
        const double grad_part =
            sym_direct.eval(x) - rho.rho.eval(x) * sym_divf.eval(x);
        expect_near(grad_part, -4.0 * a * x3s * std::pow(n, a), 1e-9,
                    "plane-attractor weighted vs plain divergence gap");
        expect_near(sym_recip.eval(x), (4.0 * a - 10.0) * x3s * std::pow(n, -a),
                    1e-9, "plane-attractor reciprocal closed form");
        expect_near(sym_divf.eval(x), -10.0 * x3s, 1e-9,
                    "plane-attractor plain divergence");
      }
    }
  }

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  expect(secs < 5.0, "oracle suite took " + std::to_string(secs) + " s");
}

void check2_planar_cubic_verdicts() {
  const Region region{2, 0.1, 2.0, std::nullopt};
  CheckConfig cfg;
  cfg.samples = 2000;
  const DensityFunction rho = norm_power_density(2.0, 2);

  const Verdict direct_pos =
      check_necessary_c1(planar_cubic(1.0), rho, region, cfg);
  expect(direct_pos.status == CheckStatus::HoldsOnSamples,
         "c=1 direct condition should hold on samples");

  const Verdict direct_neg =
      check_necessary_c1(planar_cubic(-1.0), rho, region, cfg);
  expect(direct_neg.status == CheckStatus::Indefinite,
         "c=-1 direct condition should be indefinite");
  expect(direct_neg.witness.has_value(), "indefinite verdict needs a witness");

  for (const double c : {1.0, -1.0}) {
    const Verdict recip = check_necessary_c2(planar_cubic(c), rho, region, cfg);
    expect(recip.status == CheckStatus::Indefinite,
           "reciprocal condition should be indefinite for c=" +
               std::to_string(c));
  }
}

void check3_axis_growth() {
  const Region region{2, 0.1, 2.0, std::nullopt};
  CheckConfig cfg;
  cfg.samples = 2000;
  const DensityFunction rho = norm_power_density(2.0, 2);
  const VectorField f = axis_growth();

  const Verdict necessary = check_necessary_c1(f, rho, region, cfg);
  expect(necessary.status == CheckStatus::HoldsOnSamples,
         "direct necessary condition should hold");

  const Verdict sufficient = check_sufficient(f, rho, region, cfg, 1);
  expect(sufficient.status == CheckStatus::Violated,
         "first sufficient case should be violated");
  expect(sufficient.witness.has_value(), "violation needs a witness");
  expect(std::abs(sufficient.witness->point(0)) <= 0.3,
         "witness should sit near the x2 axis, got x1 = " +
             std::to_string(sufficient.witness->point(0)));

  const Trajectory t = integrate_rk4(f, vecn({0.1, 0.1}), 1e-2, 200.0);
  expect(classify_trajectory(t, 1e-3, 1e6) == TrajectoryClass::Diverged,
         "trajectory from (0.1, 0.1) should diverge");
  expect(std::abs(t.final_state()(0)) <= 1e-6,
         "x1 should have collapsed while x2 escaped");
}

void check4_two_equilibria() {
  const Region region{2, 0.1, 2.0, std::nullopt};
  CheckConfig cfg;
  cfg.samples = 2000;
  const DensityFunction rho = norm_power_density(2.0, 2);
  const VectorField f = two_equilibria();

  const Verdict recip = check_necessary_c2(f, rho, region, cfg);
  expect(recip.status == CheckStatus::HoldsOnSamples,
         "reciprocal condition should hold on samples");

  // At this density the reciprocal integrand is exactly 2|x|^-4.
  const Expr integrand = divergence(scale_field(rho.rho_inv, f));
  for (const Vector& x : annulus_points(2, 20, 0.5, 2.0, 44)) {
    expect_near(integrand.eval(x), 2.0 * std::pow(x.squaredNorm(), -2.0), 1e-9,
                "reciprocal integrand closed form");
  }

  const struct {
    Vector start;
    TrajectoryClass cls;
  } runs[] = {
      {vecn({0.5, 0.5}), TrajectoryClass::Converged},
      {vecn({2.0, 0.01}), TrajectoryClass::Converged},
      {vecn({1.5, 0.0}), TrajectoryClass::Diverged},
  };
  for (const auto& r : runs) {
    const Trajectory t = integrate_rk4(f, r.start, 1e-3, 25.0);
    expect(classify_trajectory(t, 1e-3, 1e6) == r.cls,
           "start (" + std::to_string(r.start(0)) + ", " +
               std::to_string(r.start(1)) + ") misclassified");
  }
}

void check5_plane_attractor() {
  const Region region{3, 0.5, 2.0, std::nullopt};
  CheckConfig cfg;
  cfg.samples = 2000;
  const DensityFunction rho = norm_power_density(3.0, 3);
  const VectorField f = plane_attractor();

  for (const int which : {1, 2, 3}) {
    const Verdict v = check_sufficient(f, rho, region, cfg, which);
    expect(v.status == CheckStatus::HoldsOnSamples,
           "sufficient case " + std::to_string(which) + " should hold");
    expect(!v.strict,
           "case " + std::to_string(which) + " should be non-strict");
    expect(!v.equality_points.empty(),
           "case " + std::to_string(which) + " should list equality samples");
    for (const Witness& w : v.equality_points) {
      expect(w.point(2) == 0.0,
             "equality samples should lie on the x3 = 0 plane");
    }
  }

  const Trajectory cycle = integrate_rk4(f, vecn({1.0, 0.5, 0.0}), 1e-2, 300.0);
  expect(classify_trajectory(cycle, 0.2, 15.0) == TrajectoryClass::Bounded,
         "in-plane start should stay on its cycle");
  const Trajectory spiral =
      integrate_rk4(f, vecn({1.0, 0.0, 0.5}), 1e-2, 300.0);
  expect(classify_trajectory(spiral, 0.2, 15.0) == TrajectoryClass::Converged,
         "out-of-plane start should spiral in");
}

void check6_literal_form_exhibits() {
  {
    Matrix A(2, 2), P(2, 2);
    A << 0, 1, 1, 1;
    P << 0.6, 0.3, 0.3, 0.9;
    const ConditionCheck check =
        check_linear_condition(A, P, LinearCondition::rantzer_eq7(0.2));
    expect(check.tri.status == TriStatus::SatisfiedStrict,
           "unstable exhibit should satisfy the literal form strictly");
    expect(check.tri.max_eigenvalue < -0.1,
           "slack max eigenvalue should clear -0.1, got " +
               std::to_string(check.tri.max_eigenvalue));
    expect(check.P_positive_definite, "exhibit P should be positive definite");
    expect(linear_ground_truth(A) == Stability::Unstable,
           "exhibit A should be unstable");
  }
  {
    Matrix A(2, 2), P(2, 2);
    A << 0, 1, -1, -1;
    P << -1.5, -0.75, -0.75, -1.5;
    const ConditionCheck check =
        check_linear_condition(A, P, LinearCondition::rantzer_eq7(1.0));
    expect(check.tri.status == TriStatus::Boundary,
           "stable exhibit should sit exactly on the boundary");
    expect(!check.P_positive_definite,
           "boundary exhibit P should not be positive definite");
  }
}

void check7_certificate_search_soundness() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2026);
  std::normal_distribution<double> gauss(0.0, 1.0);
  int feasible = 0, infeasible = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 4;
    Matrix A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = gauss(rng);
    if (trial % 2 == 0) {
      // Shift half the draws left so both branches are exercised.
      A.diagonal().array() -= eigenvalues(A).max_real_part + 0.5;
    }
    const LinearCondition cond = (trial % 4 < 2)
                                     ? LinearCondition::corollary1(0.8)
                                     : LinearCondition::theorem7(0.3);
    const CertificateSearch s = find_certificate(A, cond);
    const bool hurwitz =
        eigenvalues(shifted_matrix(A, cond)).max_real_part < 0.0;
    expect(s.P.has_value() == hurwitz,
           "feasibility must match the shifted spectrum at trial " +
               std::to_string(trial));
    if (s.P) {
      ++feasible;
      expect(is_positive_definite(*s.P),
             "certificate P must be positive definite at trial " +
                 std::to_string(trial));
      const ConditionCheck recheck = check_linear_condition(A, *s.P, cond);
      expect(recheck.tri.status == TriStatus::SatisfiedStrict,
             "certificate must recheck strictly at trial " +
                 std::to_string(trial));
      expect(linear_ground_truth(A) == Stability::Stable,
             "certified matrix must be stable at trial " +
                 std::to_string(trial));
    } else {
      ++infeasible;
    }
  }
  expect(feasible >= 40 && infeasible >= 40,
         "sweep should exercise both branches, got " +
             std::to_string(feasible) + " / " + std::to_string(infeasible));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  expect(secs < 10.0, "sweep took " + std::to_string(secs) + " s");
}

void check8_published_gain_counterexample() {
  Matrix A(2, 2), B(2, 1), K(1, 2), P(2, 2);
  A << 0, 1, 1, 1;
  B << 0, 1;
  K << -0.7082, -2.2651;
  P << 0.7712, 0.3508, 0.3508, 1.122;

  const Spectrum spec = eigenvalues(A + B * K);
  expect(spec.values.size() == 2, "closed loop should have two eigenvalues");
  std::vector<double> reals;
  for (int i = 0; i < spec.values.size(); ++i) {
    expect(std::abs(spec.values(i).imag()) < 1e-9,
           "closed-loop eigenvalues should be real");
    reals.push_back(spec.values(i).real());
  }
  std::sort(reals.begin(), reals.end());
  expect(std::abs(reals[1] - 0.2) <= 0.05,
         "larger eigenvalue should be 0.2 +- 0.05, got " +
             std::to_string(reals[1]));
  expect(std::abs(reals[0] + 1.5) <= 0.05,
         "smaller eigenvalue should be -1.5 +- 0.05, got " +
             std::to_string(reals[0]));

  // The recorded pair fails the literal trace-term sign and satisfies the
  // flipped one; the flag must fire on the reading the pair satisfies.
  const ClosedLoopReport lit =
      verify_closed_loop(A, B, K, LinearCondition::rantzer_eq7(1.0), P);
  expect(lit.check.has_value() &&
             lit.check->tri.status == TriStatus::Violated,
         "literal reading should be violated by the recorded pair");
  expect(!lit.unsoundness_flag, "no flag without a satisfied inequality");

  const ClosedLoopReport flip =
      verify_closed_loop(A, B, K, LinearCondition::eq07(1.0), P);
  expect(flip.check.has_value() &&
             flip.check->tri.status == TriStatus::SatisfiedStrict,
         "flipped reading should be satisfied strictly");
  expect(flip.ground_truth == Stability::Unstable,
         "the closed loop is unstable by ground truth");
  expect(flip.unsoundness_flag,
         "the unsoundness flag must fire on the satisfied reading");
}

void check9_feedback_synthesis() {
  Matrix A(2, 2), B(2, 1);
  A << 0, 1, 1, 1;
  B << 0, 1;
  const SynthesisResult bench = synthesize_state_feedback(A, B, 1.0);
  expect(bench.closed_loop.max_real_part < -0.5,
         "benchmark closed loop should clear -0.5, got " +
             std::to_string(bench.closed_loop.max_real_part));
  const ConditionCheck cert =
      check_linear_condition(A + B * bench.K, bench.P, bench.condition);
  expect(cert.tri.status == TriStatus::SatisfiedStrict,
         "benchmark certificate should hold strictly");
  expect(cert.P_positive_definite, "benchmark P should be positive definite");

  std::mt19937_64 rng(777);
  std::normal_distribution<double> gauss(0.0, 1.0);
  int done = 0, attempts = 0;
  while (done < 100 && attempts < 150) {
    ++attempts;
    const int n = 2 + done % 3;
    Matrix Ar(n, n), Br(n, 1);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) Ar(i, j) = gauss(rng);
      Br(i, 0) = gauss(rng);
    }
    if (!is_controllable(Ar, Br)) continue;
    const SynthesisResult r = synthesize_state_feedback(Ar, Br, 1.0);
    expect(r.closed_loop.max_real_part < 0.0,
           "synthesized loop must be stable, pair " + std::to_string(done));
    expect(linear_ground_truth(Ar + Br * r.K) == Stability::Stable,
           "ground truth must agree, pair " + std::to_string(done));
    ++done;
  }
  expect(done == 100, "sweep completed only " + std::to_string(done) +
                          " of 100 pairs");
}

void check10_flux_crosscheck() {
  CheckConfig cfg;
  cfg.samples = 1000000;
  cfg.seed = 1;
  const DensityFunction rho = norm_power_density(1.0, 2);
  const GaussCrossCheck g =
      flux_sphere_estimate(planar_cubic(1.0), rho.rho, 1.0, cfg);
  expect(g.flux < 0.0 && g.volume_integral < 0.0,
         "flux and volume integral should both be negative, got " +
             std::to_string(g.flux) + " and " +
             std::to_string(g.volume_integral));
  const double rel = std::abs(g.flux - g.volume_integral) /
                     std::max(std::abs(g.flux), std::abs(g.volume_integral));
  expect(rel <= 0.05, "flux and volume integral disagree by " +
                          std::to_string(100.0 * rel) + "%");
  expect(g.surface_domain_errors == 0 && g.volume_domain_errors == 0,
         "no sample should fail to evaluate");
}

void check11_integrator_order() {
  const VectorField f(1, {parse_expr("-x1", 1)});
  Vector x0(1);
  x0 << 1.0;
  const double exact = std::exp(-1.0);
  const double e1 =
      std::abs(integrate_rk4(f, x0, 1e-2, 1.0).final_state()(0) - exact);
  const double e2 =
      std::abs(integrate_rk4(f, x0, 5e-3, 1.0).final_state()(0) - exact);
  const double ratio = e1 / e2;
  expect(ratio >= 12.0 && ratio <= 20.0,
         "error ratio out of range: " + std::to_string(ratio));
}

}  // namespace

int main() {
  const struct {
    const char* title;
    std::function<void()> fn;
  } checks[] = {
      {"symbolic divergences match finite differences and closed forms",
       check1_symbolic_divergence_oracles},
      {"planar cubic field: direct condition separates the two damping signs",
       check2_planar_cubic_verdicts},
      {"axis growth field: necessary holds, sufficient refutes, trajectory "
       "escapes",
       check3_axis_growth},
      {"two-equilibria field: reciprocal condition holds, basin boundary "
       "respected",
       check4_two_equilibria},
      {"plane attractor: non-strict holds with x3=0 equality locus, cycle "
       "and spiral",
       check5_plane_attractor},
      {"literal-form inequality: strict unstable certificate and boundary "
       "exhibit",
       check6_literal_form_exhibits},
      {"certificate search soundness sweep over 200 seeded matrices",
       check7_certificate_search_soundness},
      {"recorded gain: closed-loop eigenvalues and the unsoundness flag",
       check8_published_gain_counterexample},
      {"feedback synthesis: benchmark gain and 100-pair sweep",
       check9_feedback_synthesis},
      {"divergence theorem cross-check at one million samples",
       check10_flux_crosscheck},
      {"integrator halving-step error ratio", check11_integrator_order},
  };

  int failures = 0;
  int number = 0;
  for (const auto& c : checks) {
    ++number;
    const auto t0 = std::chrono::steady_clock::now();
    std::string error;
    try {
      c.fn();
    } catch (const std::exception& e) {
      error = e.what();
      ++failures;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (error.empty()) {
      std::printf("[PASS] %2d %s (%.2f s)\n", number, c.title, secs);
    } else {
      std::printf("[FAIL] %2d %s: %s (%.2f s)\n", number, c.title,
                  error.c_str(), secs);
    }
  }
  if (failures) {
    std::printf("acceptance: %d of %zu checks failed\n", failures,
                std::size(checks));
    return 1;
  }
  std::printf("acceptance: all %zu checks passed\n", std::size(checks));
  return 0;
}
