#pragma once

#include <cmath>
#include <cstdint>

#include "divstab/expr.hpp"

namespace divstab {

/// Small deterministic generator (splitmix64). Sampling-based verdicts must
/// reproduce bit for bit across platforms and standard library versions, so
/// nothing from <random> is used anywhere in the library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double next_u01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; pairs are cached.
  double next_gaussian() {
    if (has_cache_) {
      has_cache_ = false;
      return cache_;
    }
    const double u1 = 1.0 - next_u01();  // (0, 1], keeps the log finite
    const double u2 = next_u01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cache_ = r * std::sin(a);
    has_cache_ = true;
    return r * std::cos(a);
  }

  /// Uniform direction on the unit sphere in R^dim.
  Vector sphere_direction(int dim) {
    Vector v(dim);
    for (;;) {
      for (int i = 0; i < dim; ++i) v(i) = next_gaussian();
      const double norm = v.norm();
      if (norm > 1e-12) return v / norm;
    }
  }

 private:
  std::uint64_t state_;
  bool has_cache_ = false;
  double cache_ = 0.0;
};

}  // namespace divstab
