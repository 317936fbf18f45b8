#include <doctest.h>

#include "krf/identities.hpp"
#include "krf/scenarios.hpp"

using namespace krf;

TEST_CASE("identity suite on a small grid") {
  const IdentitySuiteReport r = check_identities(2, 1, 32);
  CHECK(r.pass);
  CHECK(r.conversion_order == 2);
  CHECK(r.checks.size() == 2 * 6);
  for (const auto& c : r.checks) CHECK_MESSAGE(c.residual <= 1e-8 * (1.0 + c.scale), c.identity);
  CHECK_THROWS_WITH_AS(check_identities(0, 1, 32), "at least one seed required", std::invalid_argument);
  CHECK_THROWS_AS(check_identities(1, 1, 20), GridError);
}

TEST_CASE("registry and overrides") {
  CHECK(scenario_names().size() == 5);
  for (const auto& name : scenario_names()) {
    const auto spec = scenario_defaults(name);
    CHECK(spec.contains("config"));
    for (const auto& [key, value] : spec.at("thresholds").items()) CHECK_MESSAGE(value.get<double>() > 0.0, key);
  }
  CHECK_THROWS_AS(scenario_defaults("nope"), UnknownScenario);

  auto spec = scenario_defaults("cao_convergence");
  apply_scenario_override(spec, "thresholds.ric_final=1e-5");
  apply_scenario_override(spec, "initial.amplitude=0.02");
  apply_scenario_override(spec, "params.collect_q=false");
  CHECK(spec["thresholds"]["ric_final"] == 1e-5);
  CHECK(spec["config"]["initial"]["amplitude"] == 0.02);
  CHECK(spec["params"]["collect_q"] == false);

  apply_scenario_override(spec, "thresholds.rm_decay=-1");
  CHECK_THROWS_AS(run_scenario("cao_convergence", spec), ConfigError);
}

TEST_CASE("cao convergence thresholds reject a truncated run") {
  auto spec = scenario_defaults("cao_convergence");
  apply_scenario_override(spec, "t_end=0.001");
  const ScenarioOutcome o = run_scenario("cao_convergence", spec);
  CHECK_FALSE(o.pass);
  bool decay_failed = false;
  for (const auto& c : o.checks) {
    if (c.name == "rm_decay") decay_failed = !c.pass;
  }
  CHECK(decay_failed);
}

TEST_CASE("breakdown probe") {
  const ScenarioOutcome o = run_scenario("breakdown_probe", scenario_defaults("breakdown_probe"));
  CHECK(o.pass);
  REQUIRE(o.runs.size() == 1);
  CHECK(o.runs[0].termination == Termination::positivity_loss);
  REQUIRE(o.runs[0].breakdown);
  CHECK(o.runs[0].breakdown->c_eq > o.runs[0].config.ceq_bound);
  const auto v = verdict_json(o);
  CHECK(v.at("format") == "KRFLAB-VERDICT v1");
  CHECK(v.at("pass") == true);
}
