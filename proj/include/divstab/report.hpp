#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "divstab/divcheck.hpp"
#include "divstab/lincheck.hpp"

namespace divstab {

/// Plain text report. No timestamps and no pointers: the same inputs produce
/// byte-identical files, which is what makes reports diffable across runs.
/// One "RESULT:" line per top-level finding; free-form detail lines are
/// indented beneath it.
class Report {
 public:
  Report(const std::string& invocation, std::uint64_t config_hash,
         std::uint64_t seed, int samples, double tolerance);

  using Fields = std::vector<std::pair<std::string, std::string>>;

  void result(const std::string& id, const Fields& fields);
  void detail(const std::string& line);
  void blank();

  const std::string& text() const { return text_; }
  void save(const std::string& path) const;

 private:
  std::string text_;
};

/// Deterministic float formatting shared by reports and CSV writers:
/// format_full round-trips exactly, format_short is for human-scale margins.
std::string format_full(double v);
std::string format_short(double v);
std::string format_point(const Vector& v);

/// Standard field sets so every command reports the same vocabulary.
Report::Fields verdict_fields(const Verdict& v);
void verdict_details(Report& report, const Verdict& v);
Report::Fields tristate_fields(const ConditionCheck& check);

extern const char* const kToolVersion;

}  // namespace divstab
