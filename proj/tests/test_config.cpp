#include "doctest.h"
#include "hsurf/config.hpp"
#include "hsurf/errors.hpp"

using namespace hsurf;

TEST_CASE("toml subset parsing") {
  const std::string text = R"(# demo
[curvature]
kind = "translator"
w = [0, 0, 1]
lambda = 0.5

[domain]
shape = "disc"
center = [0.0, 0.0]
radius = 0.5
spacing = 0.03125

[boundary]
g = "0.1*x + y"

[solver]
tolerance = 1e-9
continuation_steps = 8

[checks]
requested = ["height-area", "rotational-symmetry"]

[output]
directory = "runs/demo"
)";
  const TomlDoc doc = TomlDoc::parse_string(text);
  CHECK(doc.str("curvature", "kind") == "translator");
  CHECK(doc.number("curvature", "lambda") == 0.5);
  CHECK(doc.numbers("curvature", "w") == std::vector<double>{0, 0, 1});
  CHECK(doc.strings("checks", "requested").size() == 2);

  const RunConfig cfg = RunConfig::from_toml(doc);
  CHECK(cfg.curvature.kind() == PrescribedFunction::Kind::Translator);
  CHECK(cfg.curvature.lambda() == 0.5);
  CHECK(cfg.solver.tolerance == 1e-9);
  CHECK(cfg.solver.continuation_steps == 8);
  CHECK(cfg.output_dir == "runs/demo");
  CHECK(cfg.boundary.eval(Eigen::Vector2d(1.0, 2.0)) == doctest::Approx(2.1));
  CHECK(std::holds_alternative<Disc>(cfg.domain.shape));
}

TEST_CASE("config errors carry line numbers") {
  try {
    TomlDoc::parse_string("[solver]\ntolerance = oops\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line == 2);
  }
  CHECK_THROWS_AS(TomlDoc::parse_string("[a\n"), ConfigError);
  CHECK_THROWS_AS(TomlDoc::parse_string("x 3\n"), ConfigError);
  CHECK_THROWS_AS(TomlDoc::parse_string("k = \"unterminated\n"), ConfigError);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(RunConfig::from_toml(TomlDoc::parse_string(
                      "[curvature]\nkind = \"warp\"\nh0 = 1\n")),
                  ConfigError);
  CHECK_THROWS_AS(RunConfig::from_toml(TomlDoc::parse_string(
                      "[domain]\nshape = \"disc\"\nradius = 1.0\nspacing = -1\n")),
                  ConfigError);
  CHECK_THROWS_AS(RunConfig::from_toml(TomlDoc::parse_string(
                      "[checks]\nrequested = [\"no-such-theorem\"]\n")),
                  ConfigError);
  CHECK_THROWS_AS(RunConfig::from_toml(TomlDoc::parse_string(
                      "[sweep]\nparameter = \"h0\"\nrange = [1.0, 0.5]\nsteps = 3\n")),
                  ConfigError);
  // malformed boundary expression
  CHECK_THROWS_AS(RunConfig::from_toml(TomlDoc::parse_string(
                      "[boundary]\ng = \"x +\"\n")),
                  ConfigError);
}

TEST_CASE("rotational and sweep sections") {
  const TomlDoc doc = TomlDoc::parse_string(R"(
[curvature]
kind = "rotational"
profile = "t"

[rotational]
sigma = -1
target_radius = 0.8
angular_resolution = 128

[sweep]
parameter = "h0"
range = [0.1, 1.4]
steps = 14
)");
  const RunConfig cfg = RunConfig::from_toml(doc);
  CHECK(cfg.rotational.sigma == -1);
  CHECK(cfg.rotational.target_radius.value() == 0.8);
  CHECK(cfg.rotational.angular_resolution == 128);
  REQUIRE(cfg.sweep.has_value());
  CHECK(cfg.sweep->parameter == "h0");
  CHECK(cfg.sweep->steps == 14);
}
