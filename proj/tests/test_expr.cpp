#include <cmath>
#include <vector>

#include "doctest.h"
#include "divstab/expr.hpp"
#include "divstab/errors.hpp"
#include "divstab/rng.hpp"

using namespace divstab;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// Central difference of e along variable `var`.
double fd_partial(const Expr& e, const Vector& x, int var, double h = 1e-6) {
  Vector hi = x, lo = x;
  hi(var - 1) += h;
  lo(var - 1) -= h;
  return (e.eval(hi) - e.eval(lo)) / (2.0 * h);
}

}  // namespace

TEST_CASE("evaluation of parsed expressions at concrete points") {
  const Expr e = parse_expr("x1^2 + 3*x2 - 1/x1", 2);
  CHECK(e.eval(vec2(2.0, 5.0)) == doctest::Approx(4.0 + 15.0 - 0.5));
  const Expr trig = parse_expr("sin(x1)*cos(x2) + exp(-x1)", 2);
  CHECK(trig.eval(vec2(0.3, 0.7)) ==
        doctest::Approx(std::sin(0.3) * std::cos(0.7) + std::exp(-0.3)));
}

TEST_CASE("unary minus binds tighter than the exponent") {
  // -x1^2 reads as (-x1)^2; the printed form makes the grouping explicit.
  const Expr e = parse_expr("-x1^2", 2);
  CHECK(e.eval(vec2(2.0, 0.0)) == doctest::Approx(4.0));
  CHECK(e.str() == "(-x1)^2");
}

TEST_CASE("exponent chains are rejected") {
  CHECK_THROWS_AS(parse_expr("x1^2^3", 2), ParseError);
  try {
    parse_expr("x1^2^3", 2);
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
  }
}

TEST_CASE("parse errors carry offsets") {
  try {
    parse_expr("x1^(2", 2);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 5);
    CHECK(std::string(e.what()).find("expected ')'") != std::string::npos);
  }
  try {
    parse_expr("x0 + 1", 2);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("nonzero digit") != std::string::npos);
  }
  try {
    parse_expr("x3", 2);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("exceeds dimension 2") !=
          std::string::npos);
    CHECK(e.offset() == 0);
  }
  CHECK_THROWS_AS(parse_expr("x1 x2", 2), ParseError);
  CHECK_THROWS_AS(parse_expr("foo(x1)", 2), ParseError);
  CHECK_THROWS_AS(parse_expr("", 2), ParseError);
}

TEST_CASE("print and reparse is the identity on values") {
  const char* sources[] = {
      "x1^2 + 3*x2",          "(x1 + x2)*(x1 - x2)", "1/(1 + x1^2)",
      "sqrt(x1^2 + x2^2)",    "-(x1*x2)/(2 + x1)",   "exp(x1)*ln(2 + x2)",
      "abs(x1) + sign(x2)",   "2^-3 + x1",           "x1/x2/2",
  };
  Rng rng(7);
  for (const char* src : sources) {
    const Expr e = parse_expr(src, 2);
    const Expr back = parse_expr(e.str(), 2);
    for (int k = 0; k < 20; ++k) {
      const Vector x = vec2(0.5 + rng.next_u01(), 0.5 + rng.next_u01());
      CHECK(e.eval(x) == doctest::Approx(back.eval(x)).epsilon(1e-14));
    }
  }
}

TEST_CASE("simplification keeps printed forms small") {
  const Expr x1 = Expr::variable(1);
  const Expr zero = Expr::constant(0.0);
  const Expr one = Expr::constant(1.0);
  CHECK((x1 + zero).str() == "x1");
  CHECK((x1 - zero).str() == "x1");
  CHECK((zero - x1).str() == "-x1");
  CHECK((zero * x1).str() == "0");
  CHECK((one * x1).str() == "x1");
  CHECK((x1 / one).str() == "x1");
  CHECK(pow(x1, one).str() == "x1");
  CHECK(pow(x1, zero).str() == "1");
  CHECK((-(-x1)).str() == "x1");
  CHECK((Expr::constant(2.0) + Expr::constant(3.0)).str() == "5");
  CHECK(pow(Expr::constant(2.0), Expr::constant(10.0)).str() == "1024");
  CHECK(sin(zero).str() == "0");
}

TEST_CASE("domain failures throw with the offending point") {
  const Expr inv = parse_expr("1/x1", 1);
  Vector x(1);
  x << 0.0;
  CHECK_THROWS_AS(inv.eval(x), DomainError);
  const Expr lg = parse_expr("ln(x1)", 1);
  x << -1.0;
  try {
    lg.eval(x);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    REQUIRE(e.point().size() == 1);
    CHECK(e.point()(0) == -1.0);
  }
  const Expr rt = parse_expr("sqrt(x1)", 1);
  CHECK_THROWS_AS(rt.eval(x), DomainError);
  // A constant-folding probe must not swallow the error at build time.
  CHECK_NOTHROW(parse_expr("ln(0 - 1) + x1", 1));
}

TEST_CASE("wrong dimension input is a dimension error") {
  const Expr e = parse_expr("x2", 3);
  Vector x(1);
  x << 1.0;
  CHECK_THROWS_AS(e.eval(x), DimensionError);
  CHECK(e.max_variable() == 2);
}

TEST_CASE("differentiation agrees with central differences") {
  const char* sources[] = {
      "x1^3 - 2*x1*x2 + x2^2", "sin(x1*x2)",        "exp(-x1^2 - x2^2)",
      "sqrt(1 + x1^2)",        "ln(2 + x1 + x2^2)", "x1/x2",
      "cos(x1)^2",             "(1 + x1^2)^3",      "x1^x2",
  };
  Rng rng(11);
  for (const char* src : sources) {
    const Expr e = parse_expr(src, 2);
    const Expr d1 = e.diff(1);
    const Expr d2 = e.diff(2);
    for (int k = 0; k < 20; ++k) {
      const Vector x = vec2(0.4 + rng.next_u01(), 0.4 + rng.next_u01());
      CHECK(d1.eval(x) ==
            doctest::Approx(fd_partial(e, x, 1)).epsilon(1e-6));
      CHECK(d2.eval(x) ==
            doctest::Approx(fd_partial(e, x, 2)).epsilon(1e-6));
    }
  }
}

TEST_CASE("derivatives of abs and sign") {
  const Expr a = abs(Expr::variable(1));
  Vector x(1);
  x << -2.5;
  CHECK(a.diff(1).eval(x) == doctest::Approx(-1.0));
  x << 3.0;
  CHECK(a.diff(1).eval(x) == doctest::Approx(1.0));
  CHECK(sign(Expr::variable(1)).diff(1).eval(x) == 0.0);
}

TEST_CASE("constants and metadata") {
  const Expr c = Expr::constant(2.5);
  CHECK(c.is_constant());
  CHECK(c.constant_value() == 2.5);
  CHECK(c.max_variable() == 0);
  CHECK_FALSE(Expr::variable(3).is_constant());
  CHECK(Expr().str() == "0");
  CHECK_THROWS_AS(Expr::variable(0), DimensionError);
}

TEST_CASE("vector fields evaluate componentwise") {
  const VectorField f(2, {parse_expr("x2", 2), parse_expr("-x1 - x2^3", 2)});
  const Vector v = f.eval(vec2(1.0, 2.0));
  CHECK(v(0) == 2.0);
  CHECK(v(1) == doctest::Approx(-9.0));
  CHECK_THROWS_AS(VectorField(2, {parse_expr("x1", 2)}), DimensionError);
}

TEST_CASE("divergence matches finite differences on sample fields") {
  const Expr x1 = Expr::variable(1), x2 = Expr::variable(2);
  const VectorField f(2, {x2, -x1 - x1 * x1 * x2 - x2 * x2 * x2});
  const Expr div = divergence(f);
  Rng rng(3);
  for (int k = 0; k < 50; ++k) {
    const Vector x = vec2(2.0 * rng.next_u01() - 1.0, 2.0 * rng.next_u01() - 1.0);
    CHECK(div.eval(x) == doctest::Approx(fd_divergence(f, x)).epsilon(1e-6));
  }
  // Exact closed form: d/dx2 of the second component.
  const Vector x = vec2(0.7, -0.4);
  CHECK(div.eval(x) == doctest::Approx(-0.49 - 3 * 0.16));
}

TEST_CASE("gradient stacks the partials") {
  const Expr e = parse_expr("x1^2*x2", 2);
  const auto g = gradient(e, 2);
  REQUIRE(g.size() == 2);
  const Vector x = vec2(2.0, 3.0);
  CHECK(g[0].eval(x) == doctest::Approx(12.0));
  CHECK(g[1].eval(x) == doctest::Approx(4.0));
}

TEST_CASE("linear fields match the matrix product") {
  Matrix A(2, 2);
  A << 0, 1, -2, -3;
  const VectorField f = linear_field(A);
  Rng rng(5);
  for (int k = 0; k < 10; ++k) {
    const Vector x = vec2(rng.next_gaussian(), rng.next_gaussian());
    const Vector want = A * x;
    const Vector got = f.eval(x);
    CHECK(got(0) == doctest::Approx(want(0)).epsilon(1e-14));
    CHECK(got(1) == doctest::Approx(want(1)).epsilon(1e-14));
  }
  CHECK(divergence(f).eval(vec2(1.0, 1.0)) == doctest::Approx(A.trace()));
}

TEST_CASE("affine composition builds the closed loop") {
  // f + g u with g the constant input column and u = -x1 - 2 x2.
  const VectorField f(2, {parse_expr("x2", 2), parse_expr("x1", 2)});
  ExprMatrix g(2, 1);
  g(1, 0) = Expr::constant(1.0);
  const std::vector<Expr> u = {parse_expr("-x1 - 2*x2", 2)};
  const VectorField closed = compose_affine(f, g, u);
  Rng rng(9);
  for (int k = 0; k < 10; ++k) {
    const Vector x = vec2(rng.next_gaussian(), rng.next_gaussian());
    CHECK(closed.eval(x)(0) == doctest::Approx(x(1)).epsilon(1e-14));
    CHECK(closed.eval(x)(1) ==
          doctest::Approx(x(0) - x(0) - 2 * x(1)).epsilon(1e-13));
  }
}

TEST_CASE("expression matrices index row major") {
  ExprMatrix m(2, 2);
  m(0, 0) = Expr::constant(1.0);
  m(0, 1) = Expr::constant(2.0);
  m(1, 0) = Expr::constant(3.0);
  m(1, 1) = Expr::constant(4.0);
  CHECK(m(0, 1).constant_value() == 2.0);
  CHECK(m(1, 0).constant_value() == 3.0);
  CHECK(m.entries.size() == 4u);
  CHECK_THROWS_AS(ExprMatrix(0, 2), DimensionError);

  // Shape mismatches surface at composition time.
  const VectorField f(2, {parse_expr("x2", 2), parse_expr("x1", 2)});
  const ExprMatrix wide(2, 2);
  CHECK_THROWS_AS(compose_affine(f, wide, {Expr::constant(0.0)}),
                  DimensionError);
  const ExprMatrix tall(3, 1);
  CHECK_THROWS_AS(compose_affine(f, tall, {Expr::constant(0.0)}),
                  DimensionError);
}
