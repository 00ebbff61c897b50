#include <string>
#include <vector>

#include "doctest.h"
#include "hsurf/errors.hpp"
#include "hsurf/expr.hpp"

using hsurf::Expression;

namespace {
const std::vector<std::string> kXyz = {"x", "y", "z"};
const std::vector<std::string> kT = {"t"};

double eval3(const Expression& e, double x, double y, double z) {
  const double v[3] = {x, y, z};
  return e.eval(v);
}
}  // namespace

TEST_CASE("expression arithmetic and precedence") {
  CHECK(eval3(Expression::parse("1 + 2*3", kXyz), 0, 0, 0) == 7.0);
  CHECK(eval3(Expression::parse("(1+2)*3", kXyz), 0, 0, 0) == 9.0);
  CHECK(eval3(Expression::parse("2^3^2", kXyz), 0, 0, 0) == 512.0);  // right assoc
  CHECK(eval3(Expression::parse("-x^2", kXyz), 3, 0, 0) == -9.0);
  CHECK(eval3(Expression::parse("x - y - z", kXyz), 10, 3, 2) == 5.0);
  CHECK(eval3(Expression::parse("sin(0) + cos(0) + exp(0)", kXyz), 0, 0, 0) == 2.0);
  CHECK(eval3(Expression::parse("cos(pi)", kXyz), 0, 0, 0) == doctest::Approx(-1.0));
}

TEST_CASE("integer powers are exactly sign-symmetric") {
  const Expression cube = Expression::parse("z^3", kXyz);
  const Expression square = Expression::parse("x^2 + 2", kXyz);
  for (const double v : {0.3, 0.7071067811865476, 1e-8, 123.456}) {
    CHECK(eval3(cube, 0, 0, -v) == -eval3(cube, 0, 0, v));
    CHECK(eval3(square, -v, 0, 0) == eval3(square, v, 0, 0));
  }
}

TEST_CASE("profile variable binding") {
  const Expression p = Expression::parse("t^2 - 0.5", kT);
  const double v[1] = {2.0};
  CHECK(p.eval(v) == 3.5);
}

TEST_CASE("parse errors carry a column") {
  CHECK_THROWS_AS(Expression::parse("x + ", kXyz), hsurf::ConfigError);
  CHECK_THROWS_AS(Expression::parse("foo(3)", kXyz), hsurf::ConfigError);
  CHECK_THROWS_AS(Expression::parse("x + q", kXyz), hsurf::ConfigError);
  CHECK_THROWS_AS(Expression::parse("(x + 1", kXyz), hsurf::ConfigError);
  CHECK_THROWS_AS(Expression::parse("x 1", kXyz), hsurf::ConfigError);
  try {
    Expression::parse("x + q", kXyz);
  } catch (const hsurf::ConfigError& e) {
    CHECK(e.column == 5);
  }
}
