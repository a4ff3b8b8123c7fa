// Command line front end. Subcommands: analyze, linear, synth, simulate,
// reproduce. Exit 0 when the analysis completed (whatever the verdict),
// exit 2 on configuration problems, exit 1 on internal failures.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "divstab/config.hpp"
#include "divstab/divcheck.hpp"
#include "divstab/errors.hpp"
#include "divstab/report.hpp"
#include "divstab/reproduce.hpp"
#include "divstab/sim.hpp"
#include "divstab/synth.hpp"

namespace {

using namespace divstab;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string join_invocation(int argc, char** argv) {
  std::string s = "divstab";
  for (int i = 1; i < argc; ++i) {
    s += ' ';
    s += argv[i];
  }
  return s;
}

void emit(const Report& rep, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  rep.save((std::filesystem::path(out_dir) / "report.txt").string());
  std::fputs(rep.text().c_str(), stdout);
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<double> tol;
};

int run_analyze(const IniFile& ini, const Overrides& ov,
                const std::string& invocation, std::uint64_t hash,
                const std::string& out_dir) {
  AnalysisSetup setup = build_analysis(ini);
  if (ov.seed) setup.check.seed = *ov.seed;
  if (ov.samples) setup.check.samples = *ov.samples;
  if (ov.tol) setup.check.tolerance = *ov.tol;

  Verdict v;
  std::string id = "analyze." + setup.test;
  if (setup.test == "necessary-c1") {
    v = check_necessary_c1(setup.f, setup.density, setup.region, setup.check);
  } else if (setup.test == "necessary-c2") {
    v = check_necessary_c2(setup.f, setup.density, setup.region, setup.check);
  } else if (setup.test == "sufficient") {
    v = check_sufficient(setup.f, setup.density, setup.region, setup.check,
                         setup.which_case);
    id += ".case" + std::to_string(setup.which_case);
  } else if (setup.test == "theorem1") {
    v = check_theorem1(setup.f, *setup.S, setup.region, setup.check,
                       setup.which_case);
    id += ".case" + std::to_string(setup.which_case);
  } else {  // closed-loop; build_analysis admits nothing else
    v = check_closed_loop(setup.f, *setup.g, setup.u, setup.density,
                          setup.region, setup.check, setup.which_case);
    id += ".case" + std::to_string(setup.which_case);
  }

  Report rep(invocation, hash, setup.check.seed, setup.check.samples,
             setup.check.tolerance);
  rep.result(id, verdict_fields(v));
  verdict_details(rep, v);
  emit(rep, out_dir);
  return 0;
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

int run_linear(const IniFile& ini, const std::string& invocation,
               std::uint64_t hash, const std::string& out_dir) {
  const LinearSetup ls = build_linear(ini);
  Report rep(invocation, hash, ls.seed, 0, 0.0);

  if (ls.B && ls.K) {
    const ClosedLoopReport r =
        verify_closed_loop(ls.A, *ls.B, *ls.K, ls.condition, ls.P);
    Report::Fields f;
    if (r.check) {
      f = tristate_fields(*r.check);
    } else {
      f.emplace_back("tristate", "NOT_CHECKED");
    }
    f.emplace_back("mode", to_string(ls.condition.mode));
    f.emplace_back("ground_truth", to_string(r.ground_truth));
    f.emplace_back("unsound", r.unsoundness_flag ? "true" : "false");
    rep.result("linear.closed-loop", f);
    rep.detail("closed-loop spectrum: " + format_spectrum(r.spectrum));
    if (!r.check) {
      rep.detail("no P given and this mode has no certificate search");
    }
  } else if (ls.P) {
    const ConditionCheck check = check_linear_condition(ls.A, *ls.P, ls.condition);
    const Stability truth = linear_ground_truth(ls.A);
    const bool unsound = check.tri.status == TriStatus::SatisfiedStrict &&
                         check.P_positive_definite &&
                         truth == Stability::Unstable;
    Report::Fields f = tristate_fields(check);
    f.emplace_back("mode", to_string(ls.condition.mode));
    f.emplace_back("ground_truth", to_string(truth));
    f.emplace_back("unsound", unsound ? "true" : "false");
    rep.result("linear.check", f);
    rep.detail("spectrum of A: " + format_spectrum(eigenvalues(ls.A)));
  } else {
    if (ls.condition.mode == ConditionMode::RantzerEq7 ||
        ls.condition.mode == ConditionMode::Eq07) {
      throw ConfigError(std::string("[linear] mode ") +
                        to_string(ls.condition.mode) +
                        " has no certificate search; give P explicitly");
    }
    const CertificateSearch s = find_certificate(ls.A, ls.condition);
    Report::Fields f;
    f.emplace_back("mode", to_string(ls.condition.mode));
    f.emplace_back("feasible", s.P ? "true" : "false");
    f.emplace_back("shifted_max_real", format_full(s.shifted_max_real));
    f.emplace_back("side_condition", s.side_condition_ok ? "ok" : "violated");
    rep.result("linear.certificate", f);
    if (s.P) {
      const ConditionCheck check = check_linear_condition(ls.A, *s.P, ls.condition);
      rep.detail("P = " + format_matrix(*s.P));
      rep.detail("recheck: " + std::string(to_string(check.tri.status)) +
                 ", max_eig " + format_full(check.tri.max_eigenvalue));
    }
  }

  emit(rep, out_dir);
  return 0;
}

int run_synth(const IniFile& ini, const Overrides& ov,
              const std::string& invocation, std::uint64_t hash,
              const std::string& out_dir) {
  const LinearSetup ls = build_linear(ini);
  if (!ls.B) throw ConfigError("[linear] B is required for synthesis");

  SynthesisOptions opts;
  opts.seed = ov.seed ? *ov.seed : ls.seed;
  if (ls.target_poles) opts.target_poles = *ls.target_poles;
  const SynthesisResult r =
      synthesize_state_feedback(ls.A, *ls.B, ls.synth_gamma, opts);

  Report rep(invocation, hash, opts.seed, 0, 0.0);
  rep.result("synth.feedback",
             {{"gamma", format_short(ls.synth_gamma)},
              {"K", format_matrix(r.K)},
              {"closed_loop_max_real", format_full(r.closed_loop.max_real_part)}});
  const Matrix closed = ls.A + (*ls.B) * r.K;
  const ConditionCheck check = check_linear_condition(closed, r.P, r.condition);
  rep.result("synth.certificate", tristate_fields(check));
  rep.detail("P = " + format_matrix(r.P));
  rep.detail("closed-loop spectrum: " + format_spectrum(r.closed_loop));
  emit(rep, out_dir);
  return 0;
}

int run_simulate(const IniFile& ini, const std::string& invocation,
                 std::uint64_t hash, const std::string& out_dir) {
  const SimulateSetup s = build_simulate(ini);
  const auto entries = phase_portrait(s.f, s.starts, s.dt, s.t_final,
                                      s.delta_c, s.big_r, s.escape_radius);

  std::filesystem::create_directories(out_dir);
  Report rep(invocation, hash, 0, 0, 0.0);
  int conv = 0, div = 0, bnd = 0, failed = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const PortraitEntry& e = entries[i];
    Report::Fields f;
    f.emplace_back("start", format_point(e.start));
    if (e.failed) {
      ++failed;
      f.emplace_back("class", "FAILED");
      f.emplace_back("note", e.trajectory.error_note);
    } else {
      if (e.cls == TrajectoryClass::Converged) ++conv;
      if (e.cls == TrajectoryClass::Diverged) ++div;
      if (e.cls == TrajectoryClass::Bounded) ++bnd;
      f.emplace_back("class", to_string(e.cls));
    }
    f.emplace_back("stop", to_string(e.trajectory.reason));
    f.emplace_back("t_final", format_short(e.trajectory.final_time()));
    f.emplace_back("final_norm", format_full(e.trajectory.final_state().norm()));
    rep.result("simulate.start" + std::to_string(i), f);
    write_trajectory_csv(
        (std::filesystem::path(out_dir) / ("traj" + std::to_string(i) + ".csv"))
            .string(),
        e.trajectory);
  }
  Report::Fields f;
  f.emplace_back("converged", std::to_string(conv));
  f.emplace_back("diverged", std::to_string(div));
  f.emplace_back("bounded", std::to_string(bnd));
  if (failed) f.emplace_back("failed", std::to_string(failed));
  f.emplace_back("delta_c", format_short(s.delta_c));
  f.emplace_back("R", format_short(s.big_r));
  rep.result("simulate.portrait", f);
  write_portrait_csv((std::filesystem::path(out_dir) / "portrait.csv").string(),
                     entries);
  emit(rep, out_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"divergence based stability analysis"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  std::uint64_t seed = 1;
  int samples = 0;
  double tol = 0.0;
  std::string case_name;
  bool list_cases = false;

  auto add_common = [&](CLI::App* cmd, bool with_knobs) {
    cmd->add_option("--config", config_path, "INI configuration file")
        ->required();
    cmd->add_option("--out", out_dir, "output directory (default .)");
    if (with_knobs) {
      cmd->add_option("--seed", seed, "RNG seed override");
      cmd->add_option("--samples", samples, "sample count override");
      cmd->add_option("--tol", tol, "tolerance override");
    }
  };

  CLI::App* analyze = app.add_subcommand(
      "analyze", "sampled divergence conditions for a nonlinear system");
  add_common(analyze, true);
  CLI::App* linear = app.add_subcommand(
      "linear", "matrix inequality check or certificate search");
  add_common(linear, false);
  CLI::App* synth = app.add_subcommand(
      "synth", "state feedback synthesis with a divergence certificate");
  add_common(synth, true);
  CLI::App* simulate = app.add_subcommand(
      "simulate", "trajectories and phase portrait classification");
  add_common(simulate, false);

  CLI::App* reproduce = app.add_subcommand(
      "reproduce", "built-in studies with all inputs embedded");
  reproduce->add_option("case", case_name, "study name (see --list)");
  reproduce->add_flag("--list", list_cases, "list the study names and exit");
  reproduce->add_option("--out", out_dir, "output directory (default .)");
  reproduce->add_option("--seed", seed, "RNG seed override");
  reproduce->add_option("--samples", samples, "sample count override");
  reproduce->add_option("--tol", tol, "tolerance override");

  try {
    app.parse(argc, argv);

    Overrides ov;
    if (analyze->count("--seed") || synth->count("--seed")) ov.seed = seed;
    if (analyze->count("--samples")) ov.samples = samples;
    if (analyze->count("--tol")) ov.tol = tol;

    const std::string invocation = join_invocation(argc, argv);
    if (*reproduce) {
      if (list_cases) {
        for (const std::string& name : divstab::reproduce_cases())
          std::printf("%s\n", name.c_str());
        return 0;
      }
      if (case_name.empty())
        throw divstab::ConfigError("reproduce needs a study name; try --list");
      divstab::ReproduceOptions opts;
      opts.out_dir = out_dir;
      if (reproduce->count("--seed")) opts.seed = seed;
      if (reproduce->count("--samples")) opts.samples = samples;
      if (reproduce->count("--tol")) opts.tolerance = tol;
      std::fputs(divstab::run_reproduce(case_name, opts).c_str(), stdout);
      return 0;
    }

    const std::string raw = read_file(config_path);
    const divstab::IniFile ini = divstab::parse_ini(raw);
    const std::uint64_t hash = divstab::fnv1a_hash(raw);
    if (*analyze) return run_analyze(ini, ov, invocation, hash, out_dir);
    if (*linear) return run_linear(ini, invocation, hash, out_dir);
    if (*synth) return run_synth(ini, ov, invocation, hash, out_dir);
    return run_simulate(ini, invocation, hash, out_dir);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const divstab::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const divstab::ParseError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
