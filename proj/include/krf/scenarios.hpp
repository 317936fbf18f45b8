#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "krf/identities.hpp"
#include "krf/run.hpp"

namespace krf {

class UnknownScenario : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ScenarioCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct ScenarioOutcome {
  std::string name;
  nlohmann::json spec;
  std::vector<ScenarioCheck> checks;
  std::vector<std::string> labels;  // one per run, also its artifact subdirectory
  std::vector<RunResult> runs;
  std::vector<IdentitySuiteReport> suites;
  nlohmann::json fitted = nlohmann::json::object();
  bool pass = false;
};

const std::vector<std::string>& scenario_names();

// {config, params, thresholds} with the frozen defaults.
nlohmann::json scenario_defaults(const std::string& name);

// "thresholds.x=v" and "params.x=v" edit those sections; anything else is a
// config override such as "initial.amplitude=0.02".
void apply_scenario_override(nlohmann::json& spec, const std::string& assignment);

// Runs every sub-run, writes its artifacts under out_dir/<label> when out_dir
// is not empty, and evaluates the thresholds.
ScenarioOutcome run_scenario(const std::string& name, const nlohmann::json& spec,
                             const std::filesystem::path& out_dir = {});

nlohmann::json verdict_json(const ScenarioOutcome& outcome);
void write_verdict(const ScenarioOutcome& outcome, const std::filesystem::path& out_dir);

// Fitted remainder constants C3, C4 over several initial seeds on one
// reference; the spread is max / min per constant.
struct QConstantsStudy {
  std::vector<std::uint64_t> seeds;
  std::vector<ConstantsFit> fits;
  double c3_spread = 0.0, c4_spread = 0.0;
};
QConstantsStudy q_constants_study(const FlowConfig& base, const std::vector<std::uint64_t>& seeds);
FlowConfig q_study_config();

}  // namespace krf
