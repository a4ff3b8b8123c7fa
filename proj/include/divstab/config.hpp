#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "divstab/density.hpp"
#include "divstab/divcheck.hpp"
#include "divstab/expr.hpp"
#include "divstab/lincheck.hpp"

namespace divstab {

/// INI-style configuration:
///
///   # full-line comments with '#' or ';'
///   [section]
///   key = value
///
/// Values run to the end of the line (trailing comments are not supported;
/// ';' separates matrix rows). Double quotes around a value are stripped,
/// which keeps expression strings readable. Duplicate keys overwrite.
struct IniFile {
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;

  /// Getters throw ConfigError naming the section and key.
  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  int get_int(const std::string& section, const std::string& key) const;
  int get_int(const std::string& section, const std::string& key,
              int fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::uint64_t fallback) const;

  /// "1,0; 0,1" -> rows separated by ';', entries by ','.
  Matrix get_matrix(const std::string& section, const std::string& key) const;

  /// Rows of a matrix value interpreted as points.
  std::vector<Vector> get_points(const std::string& section,
                                 const std::string& key) const;

  Expr get_expr(const std::string& section, const std::string& key, int dim) const;
};

IniFile parse_ini(const std::string& text);
IniFile load_ini(const std::string& path);

double parse_double_strict(const std::string& text, const std::string& context);
Matrix parse_matrix(const std::string& text, const std::string& context);

/// Assembled analysis problem from [system], [density] and [check].
struct AnalysisSetup {
  VectorField f;
  std::optional<ExprMatrix> g;
  std::vector<Expr> u;
  DensityFunction density;
  std::optional<ScalarFunction> S;  // grad-norm family keeps its S for reports
  std::string test;                 // necessary-c1 | necessary-c2 | sufficient |
                                    // theorem1 | closed-loop
  int which_case = 1;
  Region region;
  CheckConfig check;
};

AnalysisSetup build_analysis(const IniFile& ini);

/// Assembled [linear] block: always A and a mode; the rest is optional.
struct LinearSetup {
  Matrix A;
  std::optional<Matrix> B, K, P;
  LinearCondition condition;
  double synth_gamma = 1.0;  // used by the synth command
  std::optional<std::vector<double>> target_poles;
  std::uint64_t seed = 1;
};

LinearSetup build_linear(const IniFile& ini);

/// Assembled [system] + [simulate] blocks.
struct SimulateSetup {
  VectorField f;
  std::vector<Vector> starts;
  double dt = 1e-3;
  double t_final = 10.0;
  double delta_c = 1e-3;
  double big_r = 1e6;
  double escape_radius = 1e6;
};

SimulateSetup build_simulate(const IniFile& ini);

/// FNV-1a over the raw bytes; stamped into every report header so a report
/// names the exact configuration that produced it.
std::uint64_t fnv1a_hash(const std::string& bytes);

}  // namespace divstab
