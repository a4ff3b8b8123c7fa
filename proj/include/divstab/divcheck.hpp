#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "divstab/density.hpp"
#include "divstab/expr.hpp"

namespace divstab {

/// Annulus r_min <= |x| <= r_max, optionally intersected with an axis box.
/// The origin is excluded by construction; every check here is about behavior
/// away from the equilibrium plus separately estimated limits toward it.
struct Region {
  int dim = 0;
  double r_min = 0.0;
  double r_max = 0.0;
  std::optional<std::pair<Vector, Vector>> box;  // lower, upper

  bool contains(const Vector& x) const;
};

struct CheckConfig {
  int samples = 2000;
  double tolerance = 1e-9;  // band half-width scales as tolerance * (1 + max |value|)
  std::uint64_t seed = 1;
  double beta = 1.0;          // third sufficient case; must be >= 1
  int limit_steps = 21;       // radii r_min * 2^-k for k = 0..limit_steps-1
  int limit_directions = 64;  // sphere directions averaged per radius
  int equality_cap = 8;       // equality samples kept per verdict
};

enum class CheckStatus { HoldsOnSamples, Violated, Indefinite, Inconclusive };
const char* to_string(CheckStatus s);

/// A concrete sample contradicting (or blocking) a claim. Re-evaluating the
/// stored expression at `point` reproduces `value` exactly.
struct Witness {
  Vector point;
  double value = 0.0;
  std::string clause;
};

/// One scalar sign claim evaluated over the sample set.
struct ClauseReport {
  std::string label;
  CheckStatus status = CheckStatus::Inconclusive;
  bool strict = false;  // no sample landed inside the tolerance band
  double min_margin = 0.0, max_margin = 0.0, mean_margin = 0.0;
  std::size_t samples = 0;
  std::size_t equality_count = 0;
  std::optional<Witness> witness;
};

/// Sequence of mean magnitudes on spheres of geometrically shrinking radius.
/// confirmed_zero requires a monotone decrease ending below 1e-6.
struct LimitCheck {
  std::string quantity;
  std::vector<double> magnitudes;
  bool confirmed_zero = false;
  std::string note;
};

/// Log-log radial slope of a quantity near the origin. The integrand of an
/// n-dimensional radial integral is integrable when it grows slower than
/// r^-n, hence the comparison against -dim. Heuristic only; never gates a
/// verdict, merely reported alongside it.
struct IntegrabilityEstimate {
  bool computed = false;
  double exponent = 0.0;
  int dim = 0;
  bool likely_integrable = false;
};

struct Verdict {
  CheckStatus status = CheckStatus::Inconclusive;
  bool strict = false;
  std::optional<Witness> witness;
  std::vector<Witness> equality_points;  // capped samples inside the band
  double min_margin = 0.0, max_margin = 0.0, mean_margin = 0.0;
  std::size_t samples_used = 0;
  std::vector<ClauseReport> clauses;  // clauses[0] is the primary claim
  std::vector<LimitCheck> origin_limits;
  std::optional<IntegrabilityEstimate> integrability;
  std::vector<std::string> notes;
};

/// Deterministic sample set for a region: axis probes at the inner, geometric
/// mean and outer radius first (these catch equality loci that random draws
/// miss almost surely), then `count` uniform draws (direction uniform on the
/// sphere, radius uniform in volume). The same (region, count, seed) triple
/// always yields the same points.
std::vector<Vector> region_samples(const Region& region, int count,
                                   std::uint64_t seed);

/// Necessary condition, direct form: div(rho f) < 0 sampled over the region,
/// plus the origin limit div(rho f) -> 0. Mixed signs beyond the tolerance
/// band give INDEFINITE with a witness; uniformly wrong sign gives VIOLATED.
Verdict check_necessary_c1(const VectorField& f, const DensityFunction& rho,
                           const Region& region, const CheckConfig& cfg);

/// Necessary condition, reciprocal form: div(rho_inv f) > 0 sampled over the
/// region. Integrability of the integrand near the origin is reported as a
/// heuristic estimate, not enforced.
Verdict check_necessary_c2(const VectorField& f, const DensityFunction& rho,
                           const Region& region, const CheckConfig& cfg);

/// Sufficient conditions, three cases:
///   1: div(rho f) - rho div(f) <= 0, origin limit div(rho f) -> 0
///   2: div(rho_inv f) >= 0 and div(f) <= 0, origin limit
///      rho^2 div(rho_inv f) -> 0
///   3: div(rho f) - beta rho^2 div(rho_inv f) <= 0 with beta >= 1 (beta > 1
///      additionally needs div(f) <= 0), both origin limits
/// At beta == 1 case 3 collapses to twice the case 1 integrand, and the two
/// verdicts agree. `strict` reflects the primary inequality only; any
/// violated clause makes the whole verdict VIOLATED.
Verdict check_sufficient(const VectorField& f, const DensityFunction& rho,
                         const Region& region, const CheckConfig& cfg,
                         int which_case);

/// Conditions through an auxiliary scalar function S: rho = |grad S|. Case 1
/// samples div(|grad S| f) < 0, case 2 samples div(|grad(1/S)| f) > 0.
/// S > 0 and grad S != 0 are checked on the sample set first; a violation
/// makes the verdict INCONCLUSIVE with the offending point. The growth of S
/// at infinity is not verifiable by sampling and is reported as an unchecked
/// assumption.
Verdict check_theorem1(const VectorField& f, const ScalarFunction& S,
                       const Region& region, const CheckConfig& cfg,
                       int which_case);

/// Sufficient conditions for the closed loop f + g u.
Verdict check_closed_loop(const VectorField& f, const ExprMatrix& g,
                          const std::vector<Expr>& u, const DensityFunction& rho,
                          const Region& region, const CheckConfig& cfg,
                          int which_case);

/// Monte Carlo cross-check of the divergence theorem: surface flux of rho*f
/// through |x| = radius against the volume integral of div(rho f) over the
/// shell [radius * 1e-3, radius]. Points that fail to evaluate are skipped
/// and counted.
struct GaussCrossCheck {
  double flux = 0.0;
  double volume_integral = 0.0;
  long long surface_samples = 0;
  long long volume_samples = 0;
  long long surface_domain_errors = 0;
  long long volume_domain_errors = 0;
};

GaussCrossCheck flux_sphere_estimate(const VectorField& f, const Expr& rho,
                                     double radius, const CheckConfig& cfg);

/// Surface area of the unit sphere boundary in R^dim and volume of the unit
/// ball; shared by the flux estimate and its tests.
double unit_sphere_area(int dim);
double unit_ball_volume(int dim);

}  // namespace divstab
