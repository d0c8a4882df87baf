#include <doctest.h>

#include <string>

#include "config_io.hpp"

using namespace wavekernel;
using wavekernel::suites::ConfigError;

namespace {

std::string field_of(const std::string& yaml) {
  try {
    cli::parse_experiment(yaml);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("empty config gives the defaults") {
  const cli::Experiment ex = cli::parse_experiment("");
  CHECK(ex.config.n == 4);
  CHECK(ex.config.h == std::vector<double>{4, 8, 16, 32});
  CHECK(ex.config.tol.scaling == 1e-9);
  CHECK_FALSE(ex.config.coupling.has_value());
}

TEST_CASE("fields are read from nested maps") {
  const cli::Experiment ex = cli::parse_experiment(
      "n: 5\npotential:\n  delta: 4\n  coupling: -0.7\ngrid:\n  radial_nodes: 120\ntolerances:\n  slope: 0.2\n"
      "suites: [scaling, born]\n");
  CHECK(ex.config.n == 5);
  CHECK(ex.config.delta == 4.0);
  REQUIRE(ex.config.coupling.has_value());
  CHECK(*ex.config.coupling == -0.7);
  CHECK(ex.config.radial_nodes == 120);
  CHECK(ex.config.tol.slope == 0.2);
  CHECK(ex.suites == std::vector<std::string>{"scaling", "born"});
}

TEST_CASE("validation errors name the field and line") {
  CHECK(field_of("a: 0.125\nn: 7\n") == "n (line 2)");
  CHECK(field_of("h: [8, 4]\n") == "h (line 1)");
  CHECK(field_of("tolerances:\n  slope: -1\n") == "tolerances.slope (line 2)");
  CHECK(field_of("grid:\n  radial_nodes: many\n") == "grid.radial_nodes (line 2)");
  CHECK(field_of("potential:\n  dleta: 3\n") == "potential.dleta (line 2)");
  CHECK(field_of("suites: [scaling, nope]\n") == "suites (line 1)");
  CHECK(field_of("n: [4\n").rfind("<syntax>", 0) == 0);
}

TEST_CASE("report json embeds the resolved config") {
  suites::Config cfg;
  cfg.n = 5;
  cfg.coupling = 0.3;
  suites::SuiteResult r;
  r.suite = "x";
  r.checks.push_back({"x.a", "d", 1, true, {{"v", 1.0}, {"inf", INFINITY}}, "note"});
  const nlohmann::json j = cli::to_json(r, cfg);
  CHECK(j["config"]["n"] == 5);
  CHECK(j["config"]["potential"]["coupling"] == 0.3);
  CHECK(j["checks"][0]["metrics"]["v"] == 1.0);
  CHECK(j["checks"][0]["metrics"]["inf"].is_null());
  CHECK(j["pass"] == true);
}
