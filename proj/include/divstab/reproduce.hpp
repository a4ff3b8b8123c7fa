#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace divstab {

struct ReproduceOptions {
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int samples = 0;         // 0 keeps the case default
  double tolerance = 0.0;  // <= 0 keeps the default 1e-9
};

/// Names accepted by run_reproduce, in presentation order.
std::vector<std::string> reproduce_cases();

/// Runs one built-in study end to end, writing <name>_report.txt plus any
/// trajectory and portrait CSVs under opts.out_dir. Returns the report text.
/// Unknown names throw ConfigError.
std::string run_reproduce(const std::string& name, const ReproduceOptions& opts);

}  // namespace divstab
