#include <doctest.h>

#include <sstream>

#include "hoqmc/config.hpp"

using namespace hoqmc::harness;

TEST_SUITE("config") {

TEST_CASE("defaults round-trip through text") {
  const ExperimentConfig def;
  std::stringstream ss(def.to_text());
  CHECK(ExperimentConfig::from_text(ss) == def);
  CHECK_NOTHROW(def.validate());
}

TEST_CASE("every key round-trips after modification") {
  ExperimentConfig c;
  c.set("experiment", "posterior");
  c.set("basis", "indicator");
  c.set("s", "2..256");
  c.set("alpha", "3");
  c.set("zeta", "2.5");
  c.set("theta", "0.1");
  c.set("walsh_constant", "0.30000000000000004");
  c.set("weights", "hybrid");
  c.set("hybrid_cutoff", "4");
  c.set("m", "5");
  c.set("mean", "1.5");
  c.set("obs_points", "0.1, 0.9");
  c.set("gamma", "0.5");
  c.set("data", "1.25,-3e-07");
  c.set("noise", "false");
  c.set("candidate_seed", "18446744073709551615");
  c.set("output", "out dir/file.csv");
  std::stringstream ss(c.to_text());
  const auto back = ExperimentConfig::from_text(ss);
  CHECK(back == c);
  CHECK(back.walsh_constant == 0.30000000000000004);
  CHECK(back.s == IntRange{2, 256});
  CHECK(back.m == IntRange{5, 5});
  CHECK(back.obs_points == std::vector<double>{0.1, 0.9});
  CHECK(back.candidate_seed == 18446744073709551615ULL);
  CHECK(back.output == "out dir/file.csv");
  for (const auto& key : ExperimentConfig::keys()) CHECK(back.get(key) == c.get(key));
}

TEST_CASE("later lines and merged text win") {
  std::stringstream ss("# experiment notes\n\nalpha = 3\nalpha = 2\n  zeta=3  \n");
  auto c = ExperimentConfig::from_text(ss);
  CHECK(c.alpha == 2);
  CHECK(c.zeta == 3.0);
  std::stringstream more("alpha = 3\n");
  c.merge_text(more);
  CHECK(c.alpha == 3);
  CHECK(c.zeta == 3.0);
}

TEST_CASE("mean and reference resolution") {
  ExperimentConfig c;
  CHECK(c.resolved_mean() == 2.0);
  c.set("basis", "indicator");
  CHECK(c.resolved_mean() == 1.0);
  c.set("mean", "auto");
  CHECK_FALSE(c.mean.has_value());
  c.set("mean", "3");
  CHECK(c.resolved_mean() == 3.0);
  c.set("m", "3..10");
  CHECK(c.resolved_m_ref() == 14);
  c.set("m_ref", "16");
  CHECK(c.resolved_m_ref() == 16);
}

TEST_CASE("errors name the offending key") {
  ExperimentConfig c;
  try {
    c.set("alhpa", "2");
    FAIL("no throw");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "alhpa");
  }
  try {
    c.set("alpha", "two");
    FAIL("no throw");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "alpha");
    CHECK(std::string(e.what()).find("'alpha'") != std::string::npos);
  }
  CHECK_THROWS_AS(c.set("m", "9..3"), ConfigError);
  CHECK_THROWS_AS(c.set("noise", "maybe"), ConfigError);
  CHECK_THROWS_AS(c.set("weights", "pod"), ConfigError);
  CHECK_THROWS_AS(c.set("s", "4x"), ConfigError);

  auto check_invalid = [](const std::string& key, const std::string& value) {
    ExperimentConfig bad;
    bad.set(key, value);
    try {
      bad.validate();
      FAIL("accepted " << key << " = " << value);
    } catch (const ConfigError& e) {
      CHECK(e.key() == key);
    }
  };
  check_invalid("alpha", "1");
  check_invalid("zeta", "1");
  check_invalid("m", "1..40");
  check_invalid("fem_degree", "3");
  check_invalid("obs_points", "0.5,1.5");
  check_invalid("gamma", "1,2");
  check_invalid("data", "1");
  check_invalid("estimator", "mcmc");
  check_invalid("mc_reps", "1");
  check_invalid("fem_problem", "exact");
  check_invalid("y_star", "0.5,2");
  check_invalid("policy", "gpu");

  std::stringstream ss("alpha 2\n");
  CHECK_THROWS_AS(ExperimentConfig::from_text(ss), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/config.txt"), std::runtime_error);
}

TEST_CASE("experiments and ranges") {
  for (auto e : {Experiment::cbc, Experiment::points, Experiment::prior, Experiment::posterior, Experiment::fem_study,
                 Experiment::trunc_study})
    CHECK(parse_experiment(to_string(e)) == e);
  CHECK(to_string(Experiment::fem_study) == "fem-study");
  CHECK(parse_range("7") == IntRange{7, 7});
  CHECK(to_string(IntRange{3, 12}) == "3..12");
  CHECK_THROWS_AS(parse_experiment("sample"), std::invalid_argument);
}

}
