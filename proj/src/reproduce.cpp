#include "divstab/reproduce.hpp"

#include <cmath>
#include <filesystem>
#include <utility>

#include "divstab/config.hpp"
#include "divstab/density.hpp"
#include "divstab/divcheck.hpp"
#include "divstab/report.hpp"
#include "divstab/sim.hpp"
#include "divstab/synth.hpp"

namespace divstab {

namespace {

struct CaseContext {
  std::string name;
  ReproduceOptions opts;
  CheckConfig cfg;

  std::string path(const std::string& suffix) const {
    return (std::filesystem::path(opts.out_dir) / (name + suffix)).string();
  }
};

CaseContext make_context(const std::string& name, const ReproduceOptions& opts) {
  CaseContext ctx;
  ctx.name = name;
  ctx.opts = opts;
  ctx.cfg.samples = opts.samples > 0 ? opts.samples : 2000;
  ctx.cfg.tolerance = opts.tolerance > 0.0 ? opts.tolerance : 1e-9;
  ctx.cfg.seed = opts.seed;
  std::filesystem::create_directories(opts.out_dir);
  return ctx;
}

Report make_report(const CaseContext& ctx) {
  const std::string inv = "reproduce " + ctx.name;
  const std::string hash_src =
      inv + " seed=" + std::to_string(ctx.cfg.seed) +
      " samples=" + std::to_string(ctx.cfg.samples) +
      " tolerance=" + format_short(ctx.cfg.tolerance);
  return Report(inv, fnv1a_hash(hash_src), ctx.cfg.seed, ctx.cfg.samples,
                ctx.cfg.tolerance);
}

std::string format_matrix(const Matrix& m) {
  std::string out = "[";
  for (int i = 0; i < m.rows(); ++i) {
    if (i) out += "; ";
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out += ", ";
      out += format_full(m(i, j));
    }
  }
  out += "]";
  return out;
}

std::string format_spectrum(const Spectrum& s) {
  std::string out;
  for (int i = 0; i < s.values.size(); ++i) {
    if (i) out += ", ";
    out += format_full(s.values(i).real());
    if (s.values(i).imag() != 0.0) {
      out += s.values(i).imag() > 0 ? "+" : "-";
      out += format_full(std::abs(s.values(i).imag()));
      out += "i";
    }
  }
  return out;
}

// --- the four nonlinear study systems -------------------------------------

VectorField planar_cubic_damped(double c) {
  const Expr x1 = Expr::variable(1), x2 = Expr::variable(2);
  return VectorField(
      2, {x2, -(Expr::constant(c) * x1) - x1 * x1 * x2 - x2 * x2 * x2});
}

VectorField axis_decay_with_growth(double b) {
  const Expr x1 = Expr::variable(1), x2 = Expr::variable(2);
  return VectorField(2, {-x1, Expr::constant(b) * x2 - x1 * x1 * x2});
}

VectorField two_equilibria_planar() {
  const Expr x1 = Expr::variable(1), x2 = Expr::variable(2);
  return VectorField(2, {-x1 + x1 * x1 - x2 * x2,
                         -x2 + Expr::constant(2.0) * x1 * x2});
}

VectorField rotation_with_plane_attractor() {
  const Expr x1 = Expr::variable(1), x2 = Expr::variable(2),
             x3 = Expr::variable(3);
  const Expr two = Expr::constant(2.0);
  return VectorField(3, {x2 - two * x1 * x3 * x3, -x1 - two * x2 * x3 * x3,
                         -two * x3 * x3 * x3});
}

void report_portrait(Report& rep, const std::string& id,
                     const std::vector<PortraitEntry>& entries, double delta_c,
                     double big_r, double t_final, double dt) {
  int conv = 0, div = 0, bnd = 0, failed = 0;
  for (const PortraitEntry& e : entries) {
    if (e.failed) {
      ++failed;
    } else if (e.cls == TrajectoryClass::Converged) {
      ++conv;
    } else if (e.cls == TrajectoryClass::Diverged) {
      ++div;
    } else {
      ++bnd;
    }
  }
  Report::Fields f;
  f.emplace_back("converged", std::to_string(conv));
  f.emplace_back("diverged", std::to_string(div));
  f.emplace_back("bounded", std::to_string(bnd));
  if (failed) f.emplace_back("failed", std::to_string(failed));
  f.emplace_back("delta_c", format_short(delta_c));
  f.emplace_back("R", format_short(big_r));
  f.emplace_back("T", format_short(t_final));
  f.emplace_back("dt", format_short(dt));
  rep.result(id, f);
}

void report_trajectory(Report& rep, const std::string& id, const Trajectory& t,
                       TrajectoryClass cls, double delta_c, double big_r) {
  Report::Fields f;
  f.emplace_back("class", to_string(cls));
  f.emplace_back("stop", to_string(t.reason));
  f.emplace_back("t_final", format_short(t.final_time()));
  f.emplace_back("final_norm", format_full(t.final_state().norm()));
  f.emplace_back("delta_c", format_short(delta_c));
  f.emplace_back("R", format_short(big_r));
  rep.result(id, f);
}

// --- cases -----------------------------------------------------------------

std::string run_ex1(const CaseContext& ctx) {
  Report rep = make_report(ctx);
  const Region region{2, 0.1, 2.0, std::nullopt};
  const DensityFunction rho = norm_power_density(2.0, 2);

  for (const double c : {1.0, -1.0}) {
    const VectorField f = planar_cubic_damped(c);
    const std::string tag = c > 0 ? "c=1" : "c=-1";
    const Verdict v1 = check_necessary_c1(f, rho, region, ctx.cfg);
    rep.result("ex1." + tag + ".necessary.direct", verdict_fields(v1));
    verdict_details(rep, v1);
    const Verdict v2 = check_necessary_c2(f, rho, region, ctx.cfg);
    rep.result("ex1." + tag + ".necessary.reciprocal", verdict_fields(v2));
    verdict_details(rep, v2);
  }

  // Divergence-theorem cross-check on the stable side.
  {
    CheckConfig flux_cfg = ctx.cfg;
    flux_cfg.samples = ctx.opts.samples > 0 ? ctx.opts.samples : 200000;
    const GaussCrossCheck gc =
        flux_sphere_estimate(planar_cubic_damped(1.0), rho.rho, 1.0, flux_cfg);
    Report::Fields f;
    f.emplace_back("flux", format_full(gc.flux));
    f.emplace_back("volume_integral", format_full(gc.volume_integral));
    f.emplace_back("samples", std::to_string(gc.surface_samples));
    rep.result("ex1.c=1.gauss-crosscheck", f);
  }

  // Phase portraits from eight compass starts at radius 1.5.
  const double dt = 1e-2, t_final = 200.0;
  std::vector<Vector> starts;
  for (int k = 0; k < 8; ++k) {
    const double a = 2.0 * M_PI * k / 8.0;
    Vector s(2);
    s << 1.5 * std::cos(a), 1.5 * std::sin(a);
    starts.push_back(s);
  }
  for (const double c : {1.0, -1.0}) {
    // Converged means the run ended inside 0.1 (the damped side settles to
    // about 0.07 by t = 200); diverged needs 15 (the unstable side sits near
    // 20 by then, growing like sqrt(2t)).
    const double delta_c = 0.1, big_r = 15.0;
    const std::string tag = c > 0 ? "c=1" : "c=-1";
    const auto entries = phase_portrait(planar_cubic_damped(c), starts, dt,
                                        t_final, delta_c, big_r);
    report_portrait(rep, "ex1." + tag + ".portrait", entries, delta_c, big_r,
                    t_final, dt);
    write_portrait_csv(ctx.path("_portrait_" + tag + ".csv"), entries);
  }

  rep.save(ctx.path("_report.txt"));
  return rep.text();
}

std::string run_ex2(const CaseContext& ctx) {
  Report rep = make_report(ctx);
  const double b = 0.1;
  const VectorField f = axis_decay_with_growth(b);
  const Region region{2, 0.1, 2.0, std::nullopt};
  const DensityFunction rho = norm_power_density(2.0, 2);

  const Verdict v1 = check_necessary_c1(f, rho, region, ctx.cfg);
  rep.result("ex2.necessary.direct", verdict_fields(v1));
  verdict_details(rep, v1);

  const Verdict vs = check_sufficient(f, rho, region, ctx.cfg, 1);
  rep.result("ex2.sufficient.case1", verdict_fields(vs));
  verdict_details(rep, vs);

  // The gap between the two verdicts is real: x1 dies out but x2 grows.
  const double dt = 1e-2, t_final = 200.0, delta_c = 1e-3, big_r = 1e6;
  Vector x0(2);
  x0 << 0.1, 0.1;
  const Trajectory t = integrate_rk4(f, x0, dt, t_final);
  const TrajectoryClass cls = classify_trajectory(t, delta_c, big_r);
  report_trajectory(rep, "ex2.simulation", t, cls, delta_c, big_r);
  rep.detail("x1_final = " + format_full(std::abs(t.final_state()(0))));
  write_trajectory_csv(ctx.path("_traj0.csv"), t);

  rep.save(ctx.path("_report.txt"));
  return rep.text();
}

std::string run_ex3(const CaseContext& ctx) {
  Report rep = make_report(ctx);
  const VectorField f = two_equilibria_planar();
  const Region region{2, 0.1, 2.0, std::nullopt};
  const DensityFunction rho = norm_power_density(2.0, 2);

  const Verdict v2 = check_necessary_c2(f, rho, region, ctx.cfg);
  rep.result("ex3.necessary.reciprocal", verdict_fields(v2));
  verdict_details(rep, v2);

  const double dt = 1e-3, t_final = 25.0, delta_c = 1e-3, big_r = 1e6;
  const std::vector<std::pair<double, double>> starts = {
      {0.5, 0.5}, {2.0, 0.01}, {1.5, 0.0}};
  for (std::size_t i = 0; i < starts.size(); ++i) {
    Vector x0(2);
    x0 << starts[i].first, starts[i].second;
    const Trajectory t = integrate_rk4(f, x0, dt, t_final);
    const TrajectoryClass cls = classify_trajectory(t, delta_c, big_r);
    report_trajectory(rep, "ex3.sim.start" + std::to_string(i), t, cls, delta_c,
                      big_r);
    write_trajectory_csv(ctx.path("_traj" + std::to_string(i) + ".csv"), t);
  }

  rep.save(ctx.path("_report.txt"));
  return rep.text();
}

std::string run_ex4(const CaseContext& ctx) {
  Report rep = make_report(ctx);
  const VectorField f = rotation_with_plane_attractor();
  // Inner radius 0.5: the integrands vanish on the whole x3 = 0 plane, and on
  // a wider annulus the tolerance band would sweep in samples far from it.
  const Region region{3, 0.5, 2.0, std::nullopt};
  const DensityFunction rho = norm_power_density(3.0, 3);

  for (const int which : {1, 2}) {
    const Verdict v = check_sufficient(f, rho, region, ctx.cfg, which);
    rep.result("ex4.sufficient.case" + std::to_string(which), verdict_fields(v));
    verdict_details(rep, v);
  }
  for (const double beta : {1.0, 2.0}) {
    CheckConfig cfg = ctx.cfg;
    cfg.beta = beta;
    const Verdict v = check_sufficient(f, rho, region, cfg, 3);
    rep.result("ex4.sufficient.case3.beta=" + format_short(beta),
               verdict_fields(v));
    verdict_details(rep, v);
  }

  const double dt = 1e-2, t_final = 300.0, delta_c = 0.2, big_r = 1e6;
  const std::vector<std::pair<std::string, Vector>> starts = [] {
    Vector cyc(3), spiral(3);
    cyc << 1.0, 0.5, 0.0;
    spiral << 1.0, 0.0, 0.5;
    return std::vector<std::pair<std::string, Vector>>{{"cycle", cyc},
                                                       {"spiral", spiral}};
  }();
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const Trajectory t = integrate_rk4(f, starts[i].second, dt, t_final);
    const TrajectoryClass cls = classify_trajectory(t, delta_c, big_r);
    report_trajectory(rep, "ex4.sim." + starts[i].first, t, cls, delta_c, big_r);
    write_trajectory_csv(ctx.path("_traj" + std::to_string(i) + ".csv"), t);
  }

  rep.save(ctx.path("_report.txt"));
  return rep.text();
}

std::string run_rantzer_eq7(const CaseContext& ctx) {
  Report rep = make_report(ctx);

  // Exhibit 1: an unstable matrix strictly satisfying the literal inequality
  // with a positive definite P. This is the soundness gap the flag exists for.
  {
    Matrix A(2, 2), P(2, 2);
    A << 0, 1, 1, 1;
    P << 0.6, 0.3, 0.3, 0.9;
    const LinearCondition cond = LinearCondition::rantzer_eq7(0.2);
    const ConditionCheck check = check_linear_condition(A, P, cond);
    const Stability truth = linear_ground_truth(A);
    Report::Fields f = tristate_fields(check);
    f.emplace_back("ground_truth", to_string(truth));
    const bool unsound = check.tri.status == TriStatus::SatisfiedStrict &&
                         check.P_positive_definite &&
                         truth == Stability::Unstable;
    f.emplace_back("unsound", unsound ? "true" : "false");
    rep.result("rantzer-eq7.unstable-exhibit", f);
    rep.detail("A = " + format_matrix(A) + ", P = " + format_matrix(P) +
               ", alpha = 0.2");
    rep.detail("spectrum of A: " + format_spectrum(eigenvalues(A)));
  }

  // Exhibit 2: a stable matrix where the inequality only holds with equality
  // and an indefinite P, so it certifies nothing.
  {
    Matrix A(2, 2), P(2, 2);
    A << 0, 1, -1, -1;
    P << -1.5, -0.75, -0.75, -1.5;
    const LinearCondition cond = LinearCondition::rantzer_eq7(1.0);
    const ConditionCheck check = check_linear_condition(A, P, cond);
    Report::Fields f = tristate_fields(check);
    f.emplace_back("ground_truth", to_string(linear_ground_truth(A)));
    rep.result("rantzer-eq7.boundary-exhibit", f);
    rep.detail("A = " + format_matrix(A) + ", P = " + format_matrix(P) +
               ", alpha = 1");
  }

  rep.save(ctx.path("_report.txt"));
  return rep.text();
}

std::string run_rantzer_synth(const CaseContext& ctx) {
  Report rep = make_report(ctx);
  Matrix A(2, 2), B(2, 1), K(1, 2), P(2, 2);
  A << 0, 1, 1, 1;
  B << 0, 1;
  K << -0.7082, -2.2651;
  P << 0.7712, 0.3508, 0.3508, 1.122;

  const Matrix closed = A + B * K;
  rep.result("rantzer-synth.spectrum",
             {{"eigs", "(" + format_spectrum(eigenvalues(closed)) + ")"},
              {"trace", format_full(closed.trace())}});

  // The published gain/certificate pair does not satisfy the literal
  // inequality; it satisfies the form with the trace term's sign flipped.
  // Both readings are checked and reported as found.
  {
    const ClosedLoopReport r =
        verify_closed_loop(A, B, K, LinearCondition::rantzer_eq7(1.0), P);
    Report::Fields f = tristate_fields(*r.check);
    f.emplace_back("ground_truth", to_string(r.ground_truth));
    f.emplace_back("unsound", r.unsoundness_flag ? "true" : "false");
    rep.result("rantzer-synth.literal-form", f);
  }
  {
    const ClosedLoopReport r =
        verify_closed_loop(A, B, K, LinearCondition::eq07(1.0), P);
    Report::Fields f = tristate_fields(*r.check);
    f.emplace_back("ground_truth", to_string(r.ground_truth));
    f.emplace_back("unsound", r.unsoundness_flag ? "true" : "false");
    rep.result("rantzer-synth.flipped-form", f);
    rep.detail("a strictly satisfied certificate on an unstable loop is the"
               " soundness gap in one line");
  }

  // A synthesis that actually stabilizes, for contrast.
  {
    SynthesisOptions opts;
    opts.seed = ctx.cfg.seed;
    const SynthesisResult s = synthesize_state_feedback(A, B, 1.0, opts);
    const ClosedLoopReport r =
        verify_closed_loop(A, B, s.K, s.condition, s.P);
    Report::Fields f = tristate_fields(*r.check);
    f.emplace_back("ground_truth", to_string(r.ground_truth));
    f.emplace_back("unsound", r.unsoundness_flag ? "true" : "false");
    f.emplace_back("K", format_matrix(s.K));
    rep.result("rantzer-synth.corrected", f);
    rep.detail("closed-loop spectrum: " + format_spectrum(s.closed_loop));
  }

  rep.save(ctx.path("_report.txt"));
  return rep.text();
}

std::string run_thm7(const CaseContext& ctx) {
  Report rep = make_report(ctx);
  const double kappa = 0.5;
  const LinearCondition cond = LinearCondition::theorem7(kappa);

  {
    Matrix A(2, 2);
    A << 0, 1, -1, -1;
    const CertificateSearch s = find_certificate(A, cond);
    Report::Fields f;
    f.emplace_back("feasible", s.P ? "true" : "false");
    f.emplace_back("shifted_max_real", format_full(s.shifted_max_real));
    f.emplace_back("side_condition", s.side_condition_ok ? "ok" : "violated");
    rep.result("thm7.hurwitz", f);
    if (s.P) {
      const ConditionCheck check = check_linear_condition(A, *s.P, cond);
      rep.detail("P = " + format_matrix(*s.P));
      rep.detail("recheck: " + std::string(to_string(check.tri.status)) +
                 ", max_eig " + format_full(check.tri.max_eigenvalue));
    }
  }
  {
    Matrix A(2, 2);
    A << 0, 1, 1, 1;
    const CertificateSearch s = find_certificate(A, cond);
    Report::Fields f;
    f.emplace_back("feasible", s.P ? "true" : "false");
    f.emplace_back("shifted_max_real", format_full(s.shifted_max_real));
    f.emplace_back("side_condition", s.side_condition_ok ? "ok" : "violated");
    rep.result("thm7.unstable", f);
  }

  rep.save(ctx.path("_report.txt"));
  return rep.text();
}

std::string run_corollary1(const CaseContext& ctx) {
  Report rep = make_report(ctx);
  Matrix A(2, 2);
  A << 0, 1, -1, -1;

  for (const double gamma : {0.5, 2.0}) {
    const LinearCondition cond = LinearCondition::corollary1(gamma);
    const CertificateSearch s = find_certificate(A, cond);
    Report::Fields f;
    f.emplace_back("gamma", format_short(gamma));
    f.emplace_back("feasible", s.P ? "true" : "false");
    f.emplace_back("shifted_max_real", format_full(s.shifted_max_real));
    rep.result("corollary1.gamma=" + format_short(gamma), f);
    if (s.P) {
      const ConditionCheck check = check_linear_condition(A, *s.P, cond);
      rep.detail("P = " + format_matrix(*s.P));
      rep.detail("recheck: " + std::string(to_string(check.tri.status)) +
                 ", max_eig " + format_full(check.tri.max_eigenvalue) +
                 ", P_pd " + (check.P_positive_definite ? "true" : "false"));
    }
  }

  rep.save(ctx.path("_report.txt"));
  return rep.text();
}

}  // namespace

std::vector<std::string> reproduce_cases() {
  return {"ex1",  "ex2",          "ex3",  "ex4",
          "rantzer-eq7", "rantzer-synth", "thm7", "corollary1"};
}

std::string run_reproduce(const std::string& name, const ReproduceOptions& opts) {
  const CaseContext ctx = make_context(name, opts);
  if (name == "ex1") return run_ex1(ctx);
  if (name == "ex2") return run_ex2(ctx);
  if (name == "ex3") return run_ex3(ctx);
  if (name == "ex4") return run_ex4(ctx);
  if (name == "rantzer-eq7") return run_rantzer_eq7(ctx);
  if (name == "rantzer-synth") return run_rantzer_synth(ctx);
  if (name == "thm7") return run_thm7(ctx);
  if (name == "corollary1") return run_corollary1(ctx);
  throw ConfigError("unknown reproduce case '" + name + "'; known cases:" + [] {
    std::string s;
    for (const std::string& c : reproduce_cases()) s += " " + c;
    return s;
  }());
}

}  // namespace divstab
