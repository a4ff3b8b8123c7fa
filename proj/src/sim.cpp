#include "divstab/sim.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace divstab {

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::Horizon: return "HORIZON";
    case StopReason::Escape: return "ESCAPE";
    case StopReason::Converged: return "CONVERGED_RADIUS";
    case StopReason::EvalError: return "EVAL_ERROR";
  }
  return "?";
}

const char* to_string(TrajectoryClass c) {
  switch (c) {
    case TrajectoryClass::Converged: return "CONVERGED";
    case TrajectoryClass::Diverged: return "DIVERGED";
    case TrajectoryClass::Bounded: return "BOUNDED";
  }
  return "?";
}

Trajectory integrate_rk4(const VectorField& f, const Vector& x0, double dt,
                         double t_final, double escape_radius,
                         double converge_radius) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (!(t_final > 0.0)) throw ConfigError("horizon must be positive");
  if (x0.size() != f.dim)
    throw DimensionError("initial state does not match the field dimension");

  Trajectory out;
  out.dt = dt;
  const long long steps = static_cast<long long>(std::ceil(t_final / dt - 1e-12));
  out.times.reserve(steps + 1);
  out.states.reserve(steps + 1);
  out.times.push_back(0.0);
  out.states.push_back(x0);

  Vector x = x0;
  for (long long k = 0; k < steps; ++k) {
    const double norm = x.norm();
    if (norm >= escape_radius) {
      out.reason = StopReason::Escape;
      return out;
    }
    if (norm <= converge_radius) {
      out.reason = StopReason::Converged;
      return out;
    }
    try {
      const Vector k1 = f.eval(x);
      const Vector k2 = f.eval(x + (dt / 2.0) * k1);
      const Vector k3 = f.eval(x + (dt / 2.0) * k2);
      const Vector k4 = f.eval(x + dt * k3);
      x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } catch (const DomainError& e) {
      out.reason = StopReason::EvalError;
      out.error_note = e.what();
      return out;
    }
    if (!x.allFinite()) {
      out.reason = StopReason::Escape;
      return out;
    }
    out.times.push_back(dt * static_cast<double>(k + 1));
    out.states.push_back(x);
  }
  const double norm = x.norm();
  if (norm >= escape_radius) {
    out.reason = StopReason::Escape;
  } else if (norm <= converge_radius) {
    out.reason = StopReason::Converged;
  } else {
    out.reason = StopReason::Horizon;
  }
  return out;
}

TrajectoryClass classify_trajectory(const Trajectory& t, double delta_c,
                                    double big_r) {
  if (!(delta_c > 0.0) || !(big_r > delta_c))
    throw ConfigError("classification needs 0 < delta_c < R");
  if (t.reason == StopReason::Escape) return TrajectoryClass::Diverged;
  const double norm = t.final_state().norm();
  if (t.reason == StopReason::Converged || norm <= delta_c)
    return TrajectoryClass::Converged;
  if (norm >= big_r) return TrajectoryClass::Diverged;
  return TrajectoryClass::Bounded;
}

std::vector<PortraitEntry> phase_portrait(const VectorField& f,
                                          const std::vector<Vector>& starts,
                                          double dt, double t_final,
                                          double delta_c, double big_r,
                                          double escape_radius) {
  std::vector<PortraitEntry> out;
  out.reserve(starts.size());
  for (const Vector& s : starts) {
    PortraitEntry e;
    e.start = s;
    e.trajectory = integrate_rk4(f, s, dt, t_final, escape_radius);
    e.failed = e.trajectory.reason == StopReason::EvalError;
    if (!e.failed) e.cls = classify_trajectory(e.trajectory, delta_c, big_r);
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

void append_double(std::string& line, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  line += buf;
}

}  // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& t) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  const int n = t.states.empty() ? 0 : static_cast<int>(t.states.front().size());
  std::string header = "t";
  for (int i = 1; i <= n; ++i) header += ",x" + std::to_string(i);
  os << header << "\n";
  std::string line;
  for (std::size_t k = 0; k < t.states.size(); ++k) {
    line.clear();
    append_double(line, t.times[k]);
    for (int i = 0; i < n; ++i) {
      line += ',';
      append_double(line, t.states[k](i));
    }
    os << line << "\n";
  }
  if (!os) throw Error("short write to " + path);
}

void write_portrait_csv(const std::string& path,
                        const std::vector<PortraitEntry>& entries) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  const int n = entries.empty() ? 0 : static_cast<int>(entries.front().start.size());
  std::string header = "index";
  for (int i = 1; i <= n; ++i) header += ",x0_" + std::to_string(i);
  header += ",class,t_final";
  os << header << "\n";
  std::string line;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    line.clear();
    line += std::to_string(k);
    for (int i = 0; i < n; ++i) {
      line += ',';
      append_double(line, entries[k].start(i));
    }
    line += ',';
    line += entries[k].failed ? "FAILED" : to_string(entries[k].cls);
    line += ',';
    append_double(line, entries[k].trajectory.final_time());
    os << line << "\n";
  }
  if (!os) throw Error("short write to " + path);
}

}  // namespace divstab
