#pragma once

#include <string>
#include <vector>

#include "divstab/expr.hpp"

namespace divstab {

/// Why integration stopped.
enum class StopReason { Horizon, Escape, Converged, EvalError };
const char* to_string(StopReason r);

struct Trajectory {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<Vector> states;  // states[k] at times[k], including the start
  StopReason reason = StopReason::Horizon;
  std::string error_note;      // filled for EvalError

  const Vector& final_state() const { return states.back(); }
  double final_time() const { return times.back(); }
};

/// Classic fixed-step fourth order Runge-Kutta. Integration halts early when
/// |x| >= escape_radius, when |x| <= converge_radius, or when a stage fails
/// to evaluate (the failing step is discarded; the trajectory ends at the
/// last good state using reason = EvalError).
Trajectory integrate_rk4(const VectorField& f, const Vector& x0, double dt,
                         double t_final, double escape_radius = 1e6,
                         double converge_radius = 1e-8);

enum class TrajectoryClass { Converged, Diverged, Bounded };
const char* to_string(TrajectoryClass c);

/// CONVERGED if the final state is inside delta_c, DIVERGED if the run
/// escaped or ended outside big_r, BOUNDED otherwise. The thresholds are the
/// caller's and belong next to the answer in any report.
TrajectoryClass classify_trajectory(const Trajectory& t, double delta_c,
                                    double big_r);

struct PortraitEntry {
  Vector start;
  Trajectory trajectory;
  TrajectoryClass cls = TrajectoryClass::Bounded;
  bool failed = false;         // EvalError; cls is then meaningless
};

/// Integrates from each start in turn. Entries come back in the order given;
/// one failing start does not disturb the others.
std::vector<PortraitEntry> phase_portrait(const VectorField& f,
                                          const std::vector<Vector>& starts,
                                          double dt, double t_final,
                                          double delta_c, double big_r,
                                          double escape_radius = 1e6);

/// Writes "t,x1,...,xn" rows, one per stored step, to the given file.
void write_trajectory_csv(const std::string& path, const Trajectory& t);

/// Writes "index,x0_1,..,x0_n,class,t_final" rows describing a portrait.
void write_portrait_csv(const std::string& path,
                        const std::vector<PortraitEntry>& entries);

}  // namespace divstab
