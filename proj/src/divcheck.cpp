#include "divstab/divcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "divstab/rng.hpp"

namespace divstab {

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::HoldsOnSamples: return "HOLDS_ON_SAMPLES";
    case CheckStatus::Violated: return "VIOLATED";
    case CheckStatus::Indefinite: return "INDEFINITE";
    case CheckStatus::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

bool Region::contains(const Vector& x) const {
  if (x.size() != dim) return false;
  const double r = x.norm();
  if (r < r_min * (1.0 - 1e-12) || r > r_max * (1.0 + 1e-12)) return false;
  if (box) {
    for (int i = 0; i < dim; ++i)
      if (x(i) < box->first(i) || x(i) > box->second(i)) return false;
  }
  return true;
}

namespace {

void validate_region(const Region& region) {
  if (region.dim < 1) throw DimensionError("region dimension must be positive");
  if (!(region.r_min > 0.0) || !(region.r_max > region.r_min))
    throw ConfigError("region needs 0 < r_min < r_max");
  if (region.box) {
    if (region.box->first.size() != region.dim ||
        region.box->second.size() != region.dim)
      throw DimensionError("region box bounds do not match the dimension");
    for (int i = 0; i < region.dim; ++i)
      if (!(region.box->first(i) < region.box->second(i)))
        throw ConfigError("region box is empty");
  }
}

void validate_config(const CheckConfig& cfg) {
  if (cfg.samples < 1) throw ConfigError("sample count must be at least 1");
  if (!(cfg.tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  if (cfg.limit_steps < 2 || cfg.limit_directions < 1)
    throw ConfigError("origin limit needs at least 2 radii and 1 direction");
}

double radius_uniform_in_volume(Rng& rng, int dim, double r_lo, double r_hi) {
  const double u = rng.next_u01();
  const double lo = std::pow(r_lo, dim);
  const double hi = std::pow(r_hi, dim);
  return std::pow(lo + u * (hi - lo), 1.0 / dim);
}

enum class Claim { Negative, Positive, NonPositive, NonNegative };

bool claim_is_strict_inequality(Claim c) {
  return c == Claim::Negative || c == Claim::Positive;
}

double oriented_margin(Claim c, double v) {
  return (c == Claim::Negative || c == Claim::NonPositive) ? -v : v;
}

ClauseReport evaluate_clause(const std::string& label, const Expr& value,
                             Claim claim, const std::vector<Vector>& pts,
                             const CheckConfig& cfg,
                             std::vector<Witness>* equality_out) {
  ClauseReport rep;
  rep.label = label;
  rep.samples = pts.size();

  std::vector<double> vals(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    try {
      vals[i] = value.eval(pts[i]);
    } catch (const DomainError& e) {
      rep.status = CheckStatus::Inconclusive;
      rep.samples = i;
      Witness w;
      w.point = pts[i];
      w.value = std::numeric_limits<double>::quiet_NaN();
      w.clause = label + ": " + e.what();
      rep.witness = w;
      return rep;
    }
  }

  double scale = 0.0;
  for (double v : vals) scale = std::max(scale, std::abs(v));
  const double band = cfg.tolerance * (1.0 + scale);

  std::size_t good = 0, bad = 0, boundary = 0;
  double worst_bad = 0.0;
  std::size_t worst_bad_at = 0;
  double min_m = std::numeric_limits<double>::infinity();
  double max_m = -std::numeric_limits<double>::infinity();
  double sum_m = 0.0;

  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double v = vals[i];
    const double m = oriented_margin(claim, v);
    min_m = std::min(min_m, m);
    max_m = std::max(max_m, m);
    sum_m += m;
    if (std::abs(v) <= band) {
      ++boundary;
      if (equality_out &&
          equality_out->size() < static_cast<std::size_t>(cfg.equality_cap))
        equality_out->push_back({pts[i], v, label});
      continue;
    }
    if (m > 0.0) {
      ++good;
    } else {
      ++bad;
      if (-m > worst_bad) {
        worst_bad = -m;
        worst_bad_at = i;
      }
    }
  }

  rep.min_margin = min_m;
  rep.max_margin = max_m;
  rep.mean_margin = sum_m / static_cast<double>(vals.size());
  rep.equality_count = boundary;
  rep.strict = boundary == 0 && bad == 0;

  if (bad > 0)
    rep.witness = Witness{pts[worst_bad_at], vals[worst_bad_at], label};

  if (claim_is_strict_inequality(claim)) {
    // Necessary-condition semantics: mixed signs are a definite
    // counterexample to "one sign everywhere", not a tolerance artifact.
    if (bad > 0 && good > 0) {
      rep.status = CheckStatus::Indefinite;
    } else if (bad > 0) {
      rep.status = CheckStatus::Violated;
    } else if (good > 0) {
      rep.status = CheckStatus::HoldsOnSamples;
    } else {
      rep.status = CheckStatus::Inconclusive;  // everything inside the band
    }
  } else {
    // Weak inequality: boundary samples are consistent with the claim.
    rep.status = bad > 0 ? CheckStatus::Violated : CheckStatus::HoldsOnSamples;
  }
  return rep;
}

Verdict assemble(std::vector<ClauseReport> clauses,
                 std::vector<Witness> equality_points, std::size_t samples) {
  Verdict v;
  v.samples_used = samples;
  v.equality_points = std::move(equality_points);

  const ClauseReport& primary = clauses.front();
  v.min_margin = primary.min_margin;
  v.max_margin = primary.max_margin;
  v.mean_margin = primary.mean_margin;
  v.strict = primary.strict;

  v.status = CheckStatus::HoldsOnSamples;
  for (const CheckStatus want :
       {CheckStatus::Violated, CheckStatus::Inconclusive, CheckStatus::Indefinite}) {
    for (const ClauseReport& c : clauses) {
      if (c.status == want) {
        v.status = want;
        v.witness = c.witness;
        break;
      }
    }
    if (v.status == want) break;
  }
  if (v.status != CheckStatus::HoldsOnSamples) v.strict = false;

  v.clauses = std::move(clauses);
  return v;
}

/// Mean |g| over a fixed direction set at radii r_min * 2^-k.
std::vector<double> radial_means(const Expr& g, int dim, double r_min,
                                 const CheckConfig& cfg, std::string* error) {
  Rng rng(cfg.seed ^ 0x5DEECE66Dull);
  std::vector<Vector> dirs;
  dirs.reserve(cfg.limit_directions);
  for (int i = 0; i < cfg.limit_directions; ++i)
    dirs.push_back(rng.sphere_direction(dim));

  std::vector<double> means;
  means.reserve(cfg.limit_steps);
  for (int k = 0; k < cfg.limit_steps; ++k) {
    const double r = std::ldexp(r_min, -k);
    double acc = 0.0;
    for (const Vector& d : dirs) {
      try {
        acc += std::abs(g.eval(r * d));
      } catch (const DomainError& e) {
        if (error) *error = e.what();
        return means;
      }
    }
    means.push_back(acc / cfg.limit_directions);
  }
  return means;
}

LimitCheck origin_limit(const Expr& g, int dim, double r_min,
                        const CheckConfig& cfg, const std::string& label) {
  LimitCheck lc;
  lc.quantity = label;
  std::string error;
  lc.magnitudes = radial_means(g, dim, r_min, cfg, &error);
  if (!error.empty()) {
    lc.note = "evaluation failed approaching the origin: " + error;
    return lc;
  }
  bool monotone = true;
  for (std::size_t k = 0; k + 1 < lc.magnitudes.size(); ++k) {
    if (lc.magnitudes[k + 1] > lc.magnitudes[k] * (1.0 + 1e-9)) {
      monotone = false;
      break;
    }
  }
  lc.confirmed_zero = monotone && !lc.magnitudes.empty() &&
                      lc.magnitudes.back() <= 1e-6;
  if (!lc.confirmed_zero && lc.note.empty())
    lc.note = monotone ? "magnitudes did not fall below 1e-6"
                       : "magnitudes are not monotonically decreasing";
  return lc;
}

IntegrabilityEstimate radial_exponent(const Expr& g, int dim, double r_min,
                                      const CheckConfig& cfg) {
  IntegrabilityEstimate est;
  est.dim = dim;
  std::string error;
  const std::vector<double> means = radial_means(g, dim, r_min, cfg, &error);

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t k = 0; k < means.size(); ++k) {
    if (!(means[k] > 0.0) || !std::isfinite(means[k])) continue;
    const double lx = std::log(std::ldexp(r_min, -static_cast<int>(k)));
    const double ly = std::log(means[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 3) return est;
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) return est;
  est.computed = true;
  est.exponent = (m * sxy - sx * sy) / denom;
  est.likely_integrable = est.exponent > -static_cast<double>(dim);
  return est;
}

void check_density_dim(const VectorField& f, const DensityFunction& rho,
                       const Region& region) {
  if (rho.dim != f.dim || region.dim != f.dim)
    throw DimensionError("field, density and region dimensions disagree");
}

}  // namespace

std::vector<Vector> region_samples(const Region& region, int count,
                                   std::uint64_t seed) {
  validate_region(region);
  if (count < 1) throw ConfigError("sample count must be at least 1");

  std::vector<Vector> pts;
  const double radii[3] = {region.r_min,
                           std::sqrt(region.r_min * region.r_max),
                           region.r_max};
  for (const double r : radii) {
    for (int i = 0; i < region.dim; ++i) {
      for (const double s : {1.0, -1.0}) {
        Vector p = Vector::Zero(region.dim);
        p(i) = s * r;
        if (region.contains(p)) pts.push_back(p);
      }
    }
  }

  const std::size_t target = pts.size() + static_cast<std::size_t>(count);
  Rng rng(seed);
  long long attempts = 0;
  const long long max_attempts = 1000LL * count + 1000;
  while (pts.size() < target) {
    if (++attempts > max_attempts)
      throw Error("region sampling stalled; the box cuts off too much of the annulus");
    const Vector dir = rng.sphere_direction(region.dim);
    const double r =
        radius_uniform_in_volume(rng, region.dim, region.r_min, region.r_max);
    Vector p = r * dir;
    if (region.contains(p)) pts.push_back(std::move(p));
  }
  return pts;
}

Verdict check_necessary_c1(const VectorField& f, const DensityFunction& rho,
                           const Region& region, const CheckConfig& cfg) {
  check_density_dim(f, rho, region);
  validate_config(cfg);
  const Expr d = divergence(scale_field(rho.rho, f));
  const std::vector<Vector> pts = region_samples(region, cfg.samples, cfg.seed);

  std::vector<Witness> eq;
  std::vector<ClauseReport> clauses;
  clauses.push_back(
      evaluate_clause("div(rho*f)", d, Claim::Negative, pts, cfg, &eq));

  Verdict v = assemble(std::move(clauses), std::move(eq), pts.size());
  v.origin_limits.push_back(
      origin_limit(d, region.dim, region.r_min, cfg, "div(rho*f)"));
  return v;
}

Verdict check_necessary_c2(const VectorField& f, const DensityFunction& rho,
                           const Region& region, const CheckConfig& cfg) {
  check_density_dim(f, rho, region);
  validate_config(cfg);
  const Expr d = divergence(scale_field(rho.rho_inv, f));
  const std::vector<Vector> pts = region_samples(region, cfg.samples, cfg.seed);

  std::vector<Witness> eq;
  std::vector<ClauseReport> clauses;
  clauses.push_back(
      evaluate_clause("div(rho_inv*f)", d, Claim::Positive, pts, cfg, &eq));

  Verdict v = assemble(std::move(clauses), std::move(eq), pts.size());
  v.integrability = radial_exponent(d, region.dim, region.r_min, cfg);
  return v;
}

Verdict check_sufficient(const VectorField& f, const DensityFunction& rho,
                         const Region& region, const CheckConfig& cfg,
                         int which_case) {
  check_density_dim(f, rho, region);
  validate_config(cfg);
  if (which_case < 1 || which_case > 3)
    throw ConfigError("sufficient condition case must be 1, 2 or 3");

  const std::vector<Vector> pts = region_samples(region, cfg.samples, cfg.seed);
  const Expr div_f = divergence(f);
  const Expr div_rho_f = divergence(scale_field(rho.rho, f));
  const Expr div_rho_inv_f = divergence(scale_field(rho.rho_inv, f));

  std::vector<Witness> eq;
  std::vector<ClauseReport> clauses;
  std::vector<LimitCheck> limits;

  switch (which_case) {
    case 1: {
      const Expr main = div_rho_f - rho.rho * div_f;
      clauses.push_back(evaluate_clause("div(rho*f) - rho*div(f)", main,
                                        Claim::NonPositive, pts, cfg, &eq));
      limits.push_back(
          origin_limit(div_rho_f, region.dim, region.r_min, cfg, "div(rho*f)"));
      break;
    }
    case 2: {
      clauses.push_back(evaluate_clause("div(rho_inv*f)", div_rho_inv_f,
                                        Claim::NonNegative, pts, cfg, &eq));
      clauses.push_back(
          evaluate_clause("div(f)", div_f, Claim::NonPositive, pts, cfg, nullptr));
      const Expr glued = rho.rho * rho.rho * div_rho_inv_f;
      limits.push_back(origin_limit(glued, region.dim, region.r_min, cfg,
                                    "rho^2*div(rho_inv*f)"));
      break;
    }
    case 3: {
      if (!(cfg.beta >= 1.0))
        throw ConfigError("third sufficient case needs beta >= 1");
      const Expr combo =
          div_rho_f - Expr::constant(cfg.beta) * rho.rho * rho.rho * div_rho_inv_f;
      clauses.push_back(
          evaluate_clause("div(rho*f) - beta*rho^2*div(rho_inv*f)", combo,
                          Claim::NonPositive, pts, cfg, &eq));
      if (cfg.beta > 1.0)
        clauses.push_back(evaluate_clause("div(f)", div_f, Claim::NonPositive,
                                          pts, cfg, nullptr));
      limits.push_back(
          origin_limit(div_rho_f, region.dim, region.r_min, cfg, "div(rho*f)"));
      limits.push_back(origin_limit(rho.rho * rho.rho * div_rho_inv_f,
                                    region.dim, region.r_min, cfg,
                                    "rho^2*div(rho_inv*f)"));
      break;
    }
  }

  Verdict v = assemble(std::move(clauses), std::move(eq), pts.size());
  v.origin_limits = std::move(limits);
  return v;
}

Verdict check_theorem1(const VectorField& f, const ScalarFunction& S,
                       const Region& region, const CheckConfig& cfg,
                       int which_case) {
  if (S.dim != f.dim || region.dim != f.dim)
    throw DimensionError("field, scalar function and region dimensions disagree");
  validate_config(cfg);
  if (which_case != 1 && which_case != 2)
    throw ConfigError("auxiliary-function condition case must be 1 or 2");

  const std::vector<Vector> pts = region_samples(region, cfg.samples, cfg.seed);

  // Preconditions on the same sample set: S positive, grad S nonvanishing.
  const std::vector<Expr> grad_s = gradient(S.expr, S.dim);
  Expr grad_sq = Expr::constant(0.0);
  for (const Expr& gi : grad_s) grad_sq = grad_sq + gi * gi;

  std::vector<Witness> s_eq, g_eq;
  const ClauseReport s_pos =
      evaluate_clause("S", S.expr, Claim::Positive, pts, cfg, &s_eq);
  const ClauseReport g_nz =
      evaluate_clause("|grad S|^2", grad_sq, Claim::Positive, pts, cfg, &g_eq);

  auto precondition_failure = [&](const ClauseReport& rep,
                                  const std::vector<Witness>& eq,
                                  const std::string& why) {
    Verdict v;
    v.status = CheckStatus::Inconclusive;
    v.samples_used = pts.size();
    v.witness = rep.witness;
    if (!v.witness && !eq.empty()) v.witness = eq.front();
    v.notes.push_back(why);
    v.clauses.push_back(rep);
    return v;
  };

  if (s_pos.status != CheckStatus::HoldsOnSamples || !s_pos.strict)
    return precondition_failure(s_pos, s_eq,
                                "S is not strictly positive on the sample set");
  if (g_nz.status != CheckStatus::HoldsOnSamples || !g_nz.strict)
    return precondition_failure(g_nz, g_eq,
                                "grad S vanishes somewhere on the sample set");

  const DensityFunction rho = grad_norm_density(S);
  Verdict v = which_case == 1 ? check_necessary_c1(f, rho, region, cfg)
                              : check_necessary_c2(f, rho, region, cfg);
  v.notes.push_back("growth of S along |x| -> inf is assumed, not checked");
  return v;
}

Verdict check_closed_loop(const VectorField& f, const ExprMatrix& g,
                          const std::vector<Expr>& u, const DensityFunction& rho,
                          const Region& region, const CheckConfig& cfg,
                          int which_case) {
  const VectorField closed = compose_affine(f, g, u);
  return check_sufficient(closed, rho, region, cfg, which_case);
}

double unit_sphere_area(int dim) {
  if (dim < 1) throw DimensionError("dimension must be positive");
  const double half = 0.5 * dim;
  return 2.0 * std::pow(M_PI, half) / std::tgamma(half);
}

double unit_ball_volume(int dim) {
  if (dim < 1) throw DimensionError("dimension must be positive");
  const double half = 0.5 * dim;
  return std::pow(M_PI, half) / std::tgamma(half + 1.0);
}

GaussCrossCheck flux_sphere_estimate(const VectorField& f, const Expr& rho,
                                     double radius, const CheckConfig& cfg) {
  if (!(radius > 0.0)) throw ConfigError("flux radius must be positive");
  if (rho.max_variable() > f.dim)
    throw DimensionError("density references variables beyond the field dimension");
  validate_config(cfg);
  const int n = f.dim;

  GaussCrossCheck out;
  Rng rng(cfg.seed);

  double acc = 0.0;
  for (int i = 0; i < cfg.samples; ++i) {
    const Vector dir = rng.sphere_direction(n);
    const Vector p = radius * dir;
    try {
      const double w = rho.eval(p);
      acc += w * f.eval(p).dot(dir);
      ++out.surface_samples;
    } catch (const DomainError&) {
      ++out.surface_domain_errors;
    }
  }
  if (out.surface_samples == 0)
    throw Error("every surface sample failed to evaluate");
  out.flux = unit_sphere_area(n) * std::pow(radius, n - 1) * acc /
             static_cast<double>(out.surface_samples);

  const Expr dvg = divergence(scale_field(rho, f));
  const double r_lo = radius * 1e-3;
  double acc2 = 0.0;
  for (int i = 0; i < cfg.samples; ++i) {
    const Vector dir = rng.sphere_direction(n);
    const double r = radius_uniform_in_volume(rng, n, r_lo, radius);
    try {
      acc2 += dvg.eval(r * dir);
      ++out.volume_samples;
    } catch (const DomainError&) {
      ++out.volume_domain_errors;
    }
  }
  if (out.volume_samples == 0)
    throw Error("every volume sample failed to evaluate");
  const double shell =
      unit_ball_volume(n) * (std::pow(radius, n) - std::pow(r_lo, n));
  out.volume_integral = shell * acc2 / static_cast<double>(out.volume_samples);
  return out;
}

}  // namespace divstab
