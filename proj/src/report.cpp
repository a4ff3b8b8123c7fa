#include "divstab/report.hpp"

#include <cstdio>
#include <fstream>

namespace divstab {

const char* const kToolVersion = "divstab 1.0.0";

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string format_point(const Vector& v) {
  std::string out = "(";
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_full(v(i));
  }
  out += ")";
  return out;
}

Report::Report(const std::string& invocation, std::uint64_t config_hash,
               std::uint64_t seed, int samples, double tolerance) {
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(config_hash));
  text_ += std::string("# ") + kToolVersion + "\n";
  text_ += "# invocation: " + invocation + "\n";
  text_ += std::string("# config-hash: ") + hash_hex + "\n";
  text_ += "# seed: " + std::to_string(seed) + "\n";
  text_ += "# samples: " + std::to_string(samples) + "\n";
  text_ += "# tolerance: " + format_short(tolerance) + "\n";
  text_ += "\n";
}

void Report::result(const std::string& id, const Fields& fields) {
  text_ += "RESULT: " + id;
  for (const auto& [k, v] : fields) text_ += " " + k + "=" + v;
  text_ += "\n";
}

void Report::detail(const std::string& line) { text_ += "  " + line + "\n"; }

void Report::blank() { text_ += "\n"; }

void Report::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << text_;
  if (!os) throw Error("short write to " + path);
}

Report::Fields verdict_fields(const Verdict& v) {
  Report::Fields f;
  f.emplace_back("status", to_string(v.status));
  f.emplace_back("strict", v.strict ? "true" : "false");
  f.emplace_back("samples", std::to_string(v.samples_used));
  f.emplace_back("min_margin", format_short(v.min_margin));
  f.emplace_back("mean_margin", format_short(v.mean_margin));
  return f;
}

void verdict_details(Report& report, const Verdict& v) {
  for (const ClauseReport& c : v.clauses) {
    report.detail("clause '" + c.label + "': " + to_string(c.status) +
                  (c.strict ? " (strict)" : "") + ", margin min " +
                  format_short(c.min_margin) + " max " + format_short(c.max_margin) +
                  " mean " + format_short(c.mean_margin) + ", equality samples " +
                  std::to_string(c.equality_count));
  }
  if (v.witness) {
    report.detail("witness: value " + format_full(v.witness->value) + " at " +
                  format_point(v.witness->point) + " [" + v.witness->clause + "]");
  }
  for (const Witness& w : v.equality_points) {
    report.detail("equality sample: value " + format_full(w.value) + " at " +
                  format_point(w.point));
  }
  for (const LimitCheck& lc : v.origin_limits) {
    std::string line = "origin limit of " + lc.quantity + ": " +
                       (lc.confirmed_zero ? "confirmed zero" : "not confirmed");
    if (!lc.magnitudes.empty())
      line += ", last mean magnitude " + format_short(lc.magnitudes.back());
    if (!lc.note.empty()) line += " (" + lc.note + ")";
    report.detail(line);
  }
  if (v.integrability) {
    if (v.integrability->computed) {
      report.detail(std::string("integrability heuristic: radial exponent ") +
                    format_short(v.integrability->exponent) + " vs -dim = " +
                    format_short(-static_cast<double>(v.integrability->dim)) +
                    (v.integrability->likely_integrable ? ", likely integrable"
                                                        : ", likely not integrable"));
    } else {
      report.detail("integrability heuristic: not computable from the radial means");
    }
  }
  for (const std::string& n : v.notes) report.detail("note: " + n);
}

Report::Fields tristate_fields(const ConditionCheck& check) {
  Report::Fields f;
  f.emplace_back("tristate", to_string(check.tri.status));
  f.emplace_back("max_eig", format_full(check.tri.max_eigenvalue));
  f.emplace_back("min_eig", format_full(check.tri.min_eigenvalue));
  f.emplace_back("P_pd", check.P_positive_definite ? "true" : "false");
  f.emplace_back("side_condition", check.side_condition_ok ? "ok" : "violated");
  return f;
}

}  // namespace divstab
