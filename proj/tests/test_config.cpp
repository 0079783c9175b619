#include "doctest.h"

#include "f2erg/config.hpp"
#include "f2erg/errors.hpp"

using namespace f2erg;

TEST_CASE("defaults parse and validate") {
  const ExperimentConfig c = parse_config("");
  CHECK(c.seed == 1);
  CHECK(c.tower_k == 4);
  CHECK(c.eps == Rational(1, 5));
  CHECK(c.glue_kappa == Rational(1, 64));
  CHECK(c.finite_systems == 50);
}

TEST_CASE("values are read from their sections") {
  const ExperimentConfig c = parse_config(
      "[run]\ncommand = build-tower\nseed = 77\nworkers = 3\n"
      "[tower]\nk = 2\nkappas = 1/64, 1/100\nMs = 5, 7\n"
      "[survey]\neps = 3/10\nN_max = 4\n"
      "[calibrate]\nrequired = 19/20\n");
  CHECK(c.command == "build-tower");
  CHECK(c.seed == 77);
  CHECK(c.workers == 3);
  REQUIRE(c.tower_kappas.size() == 2);
  CHECK(c.tower_kappas[1] == Rational(1, 100));
  CHECK(c.tower_Ms == std::vector<int>{5, 7});
  CHECK(c.eps == Rational(3, 10));
  CHECK(c.N_max == 4);
  CHECK(c.calib_required == doctest::Approx(0.95));
}

TEST_CASE("kappa must lie strictly inside (0, 1/4)") {
  CHECK_THROWS_AS(parse_config("[glue]\nkappa = 5/4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[glue]\nkappa = 1/4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[glue]\nkappa = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[tower]\nk = 1\nkappas = 5/4\nMs = 2\n"), ConfigError);
  CHECK_NOTHROW(parse_config("[glue]\nkappa = 1/5\n"));
}

TEST_CASE("malformed and unknown input is rejected") {
  CHECK_THROWS_AS(parse_config("[glue]\nkappa = one/64\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[glue]\nkappa = 1/0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[run]\nseed = -3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[run]\nseed = 12x\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[run]\nsed = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[plot]\nwidth = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("seed = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[run\nseed = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[run]\ncommand = plot\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[survey]\nmode = deep\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[tower]\nk = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[chain]\nn_hi = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[glue]\nM_candidates = 128, 64\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[run]\nworkers = 0\n"), ConfigError);
}

TEST_CASE("the echo reproduces the configuration") {
  const ExperimentConfig c = parse_config(
      "[run]\ncommand = survey\nseed = 9\n[survey]\nmode = glued\neps = 1/4\n"
      "[glue]\nkappa = 1/128\nM_candidates = 16, 32\ncopy2_threshold = 0.55\n"
      "[axioms]\nmass_tolerance = 0.001\n");
  const std::string echo = echo_ini(c);
  const ExperimentConfig back = parse_config(echo);
  CHECK(echo_ini(back) == echo);
  CHECK(back.glue_kappa == Rational(1, 128));
  CHECK(back.M_candidates == std::vector<int>{16, 32});
  CHECK(back.copy2_threshold == c.copy2_threshold);
  CHECK(back.mass_tolerance == c.mass_tolerance);
  CHECK(echo.find("kappa = 1/128") != std::string::npos);
}
