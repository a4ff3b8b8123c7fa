#include <cmath>

#include "doctest.h"
#include "divstab/density.hpp"
#include "divstab/errors.hpp"
#include "divstab/rng.hpp"

using namespace divstab;

namespace {

Vector sample_point(Rng& rng, int dim) {
  Vector x(dim);
  for (int i = 0; i < dim; ++i) x(i) = 0.3 + rng.next_u01();
  return x;
}

}  // namespace

TEST_CASE("norm power density evaluates |x|^(2 alpha)") {
  for (const double alpha : {1.0, 2.0, 3.0}) {
    const DensityFunction d = norm_power_density(alpha, 3);
    CHECK(d.family == DensityFamily::NormPower);
    Rng rng(17);
    for (int k = 0; k < 20; ++k) {
      const Vector x = sample_point(rng, 3);
      const double n2 = x.squaredNorm();
      CHECK(d.rho.eval(x) == doctest::Approx(std::pow(n2, alpha)).epsilon(1e-12));
      CHECK(d.rho.eval(x) * d.rho_inv.eval(x) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(norm_power_density(0.0, 2), Error);
  CHECK_THROWS_AS(norm_power_density(-1.0, 2), Error);
}

TEST_CASE("norm power gradient matches the closed form") {
  const double alpha = 2.0;
  const DensityFunction d = norm_power_density(alpha, 2);
  const auto grad = gradient(d.rho, 2);
  Rng rng(23);
  for (int k = 0; k < 20; ++k) {
    const Vector x = sample_point(rng, 2);
    const double scale = 2.0 * alpha * std::pow(x.squaredNorm(), alpha - 1.0);
    CHECK(grad[0].eval(x) == doctest::Approx(scale * x(0)).epsilon(1e-12));
    CHECK(grad[1].eval(x) == doctest::Approx(scale * x(1)).epsilon(1e-12));
  }
}

TEST_CASE("quadratic form density uses x'Px") {
  Matrix P(2, 2);
  P << 2, 0.5, 0.5, 1;
  const DensityFunction d = quadratic_form_density(P, 2.0);
  Rng rng(29);
  for (int k = 0; k < 20; ++k) {
    const Vector x = sample_point(rng, 2);
    const double q = x.dot(P * x);
    CHECK(d.rho.eval(x) == doctest::Approx(q * q).epsilon(1e-12));
    CHECK(d.rho_inv.eval(x) == doctest::Approx(1.0 / (q * q)).epsilon(1e-12));
  }
  REQUIRE(d.form.has_value());
  CHECK((*d.form - P).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("quadratic form density rejects bad matrices") {
  Matrix notsym(2, 2);
  notsym << 1, 0.2, 0.0, 1;
  CHECK_THROWS_AS(quadratic_form_density(notsym, 1.0), Error);
  Matrix notpd(2, 2);
  notpd << 1, 2, 2, 1;
  CHECK_THROWS_AS(quadratic_form_density(notpd, 1.0), Error);
}

TEST_CASE("gradient norm density is |grad S| with its own reciprocal") {
  // S = (x1^2 + x2^2)/2 gives |grad S| = |x| and |grad S|/S^2 = 4/|x|^3.
  const ScalarFunction S{2, parse_expr("(x1^2 + x2^2)/2", 2)};
  const DensityFunction d = grad_norm_density(S);
  CHECK(d.family == DensityFamily::GradNorm);
  Rng rng(31);
  for (int k = 0; k < 20; ++k) {
    const Vector x = sample_point(rng, 2);
    const double r = x.norm();
    CHECK(d.rho.eval(x) == doctest::Approx(r).epsilon(1e-12));
    CHECK(d.rho_inv.eval(x) == doctest::Approx(4.0 / (r * r * r)).epsilon(1e-12));
    // The reciprocal channel is |grad(1/S)| rewritten, not 1/rho.
    CHECK(d.rho.eval(x) * d.rho_inv.eval(x) != doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("custom density keeps both channels as given") {
  const DensityFunction d =
      custom_density(1, parse_expr("x1^2", 1), parse_expr("1/x1^2", 1));
  Vector x(1);
  x << 3.0;
  CHECK(d.rho.eval(x) == 9.0);
  CHECK(d.rho_inv.eval(x) == doctest::Approx(1.0 / 9.0));
  CHECK(d.family == DensityFamily::Custom);
}

TEST_CASE("scaling a field multiplies every component") {
  const VectorField f(2, {parse_expr("x2", 2), parse_expr("-x1", 2)});
  const Expr rho = squared_norm_expr(2);
  const VectorField g = scale_field(rho, f);
  Rng rng(37);
  for (int k = 0; k < 20; ++k) {
    const Vector x = sample_point(rng, 2);
    const double n2 = x.squaredNorm();
    CHECK(g.eval(x)(0) == doctest::Approx(n2 * x(1)).epsilon(1e-12));
    CHECK(g.eval(x)(1) == doctest::Approx(-n2 * x(0)).epsilon(1e-12));
  }
}
