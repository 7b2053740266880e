#include <doctest.h>

#include "lrsim/config.hpp"
#include "lrsim/errors.hpp"
#include "lrsim/experiment_config.hpp"

using namespace lrsim;

TEST_CASE("flat key = value parsing") {
  const Config c = Config::parse(
      "# comment\n"
      "truth.d = 3\n"
      "\n"
      "  noise.sigma=0.25   # trailing\n"
      "rate.n_grid = 100, 300,1000\n"
      "chain.tune = false\n"
      "truth.d = 4\n");
  CHECK(c.get_long("truth.d", 0) == 4);
  CHECK(c.get_double("noise.sigma", 0) == 0.25);
  CHECK(c.get_longs("rate.n_grid") == std::vector<long>{100, 300, 1000});
  CHECK_FALSE(c.get_bool("chain.tune", true));
  CHECK(c.get_string("missing", "fallback") == "fallback");
  CHECK_THROWS_AS(c.require_string("missing"), ConfigError);
  CHECK_THROWS_AS(Config::parse("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("a = x\n").get_double("a", 0), ConfigError);
  CHECK_THROWS_AS(c.check_known({"truth.d"}), ConfigError);
  CHECK_THROWS_AS(Config::load("/nonexistent/lrsim.conf"), ConfigError);
}

TEST_CASE("experiment config defaults and validation") {
  const ExperimentConfig e = ExperimentConfig::from(Config::parse("run.seed = 5\n"), "fit");
  CHECK(e.seed == 5);
  CHECK(e.d == 3);
  CHECK(e.chains == 4);
  CHECK(e.chain.thin == 10);
  CHECK(e.chain.effective_burn_in() == e.chain.iterations / 5);
  CHECK(e.chain.schedule.dimension_every == 5);
  CHECK(e.L == 0.5);
  CHECK(e.constants_for(336).lambda == doctest::Approx(336.0 / (64 * 2 * 2 + 2 * 8 * (4 + 0.25))));

  CHECK_THROWS_AS(ExperimentConfig::from(Config::parse("truth.d = 3\n"), "fit"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from(Config::parse("run.seed = 1\ntruth.colour = red\n"), "fit"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from(Config::parse("run.seed = 1\ntruth.C = 0.5\n"), "fit"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from(Config::parse("run.seed = 1\nrate.n_grid = 300, 100\n"), "rate"),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from(Config::parse("run.seed = 1\nchain.thin = 0\n"), "fit"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from(Config::parse("run.seed = 1\nnoise.kind = cauchy\n"), "fit"), ConfigError);

  const ExperimentConfig m =
      ExperimentConfig::from(Config::parse("run.seed = 1\nmodel.lambda_multiplier = 10\n"), "fit");
  CHECK(m.constants_for(336).lambda == doctest::Approx(10 * e.constants_for(336).lambda));
  const ExperimentConfig fixed = ExperimentConfig::from(Config::parse("run.seed = 1\nmodel.lambda = 3\n"), "fit");
  CHECK(fixed.constants_for(100).lambda == 3.0);
}
