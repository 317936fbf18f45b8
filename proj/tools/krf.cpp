#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "krf/checkpoint.hpp"
#include "krf/identities.hpp"
#include "krf/report.hpp"
#include "krf/scenarios.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { ok = 0, failure = 1, usage = 2, breakdown = 3 };

json suite_json(const krf::IdentitySuiteReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"identity", c.identity}, {"seed", c.seed}, {"residual", c.residual}, {"scale", c.scale},
                      {"tolerance", c.tolerance}, {"pass", c.pass}});
  }
  return json{{"format", "KRFLAB-IDENTITIES v1"}, {"n", r.n}, {"N", r.N}, {"seeds", r.seeds},
              {"conversion_order", r.conversion_order}, {"pass", r.pass}, {"checks", checks}};
}

int finish_run(const krf::RunResult& result, const fs::path& out) {
  krf::write_run_artifacts(result, out);
  krf::emit_plotdata(result, out);
  std::printf("termination %s after %ld steps, t = %.6g, %.1f s\n", krf::to_string(result.termination).c_str(),
              result.steps, result.records.empty() ? 0.0 : result.records.back().t, result.wall_seconds);
  if (result.breakdown) {
    const auto& b = *result.breakdown;
    std::printf("breakdown at step %ld stage %d point %zu: eigenvalue %s, C_eq %s\n", b.step, b.stage, b.point,
                krf::format_double(b.eigenvalue).c_str(), krf::format_double(b.c_eq).c_str());
  }
  if (!result.records.empty()) {
    std::printf("final sup|Ric| %s\n", krf::format_double(result.records.back().ric_sup).c_str());
  }
  return result.termination == krf::Termination::reached_t_end ? ok : breakdown;
}

int check_identities(int seeds, int n, int N, const std::string& out) {
  const krf::IdentitySuiteReport report = krf::check_identities(seeds, n, N);
  std::size_t failed = 0;
  for (const auto& c : report.checks) {
    if (c.pass) continue;
    ++failed;
    std::printf("FAIL %s seed %llu: residual %.3e, scale %.3e\n", c.identity.c_str(),
                static_cast<unsigned long long>(c.seed), c.residual, c.scale);
  }
  std::printf("%zu checks, %zu failed\n", report.checks.size(), failed);
  if (!out.empty()) krf::write_text(fs::path(out) / "identities.json", suite_json(report).dump(2));
  return report.pass ? ok : failure;
}

int run_config(const std::string& config_path, const std::string& out, std::optional<double> fixed_dt) {
  krf::FlowConfig config = krf::load_config(config_path);
  if (fixed_dt) config.dt_fixed = *fixed_dt;
  krf::RunOptions options;
  options.checkpoint_dir = fs::path(out) / "checkpoints";
  return finish_run(krf::run(config, options), out);
}

int run_scenario(const std::string& name, const std::vector<std::string>& sets, const std::string& out) {
  json spec = krf::scenario_defaults(name);
  for (const auto& s : sets) krf::apply_scenario_override(spec, s);
  const krf::ScenarioOutcome outcome = krf::run_scenario(name, spec, out);
  krf::write_verdict(outcome, out);
  for (const auto& c : outcome.checks) {
    std::printf("%s %s: %s (threshold %s)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                krf::format_double(c.value).c_str(), krf::format_double(c.threshold).c_str());
  }
  std::printf("scenario %s: %s\n", name.c_str(), outcome.pass ? "pass" : "fail");
  return outcome.pass ? ok : failure;
}

int resume_checkpoint(const std::string& path, std::string out) {
  const krf::Checkpoint ckpt = krf::load_checkpoint(path);
  if (out.empty()) out = fs::path(path).parent_path().parent_path().string();
  krf::RunOptions options;
  options.checkpoint_dir = fs::path(path).parent_path();
  return finish_run(krf::resume(ckpt, options), out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kahler-Ricci flow lab on complex tori"};
  app.require_subcommand(1);

  int seeds = 10, n = 1, N = 64;
  std::string id_out;
  auto* ids = app.add_subcommand("check-identities", "frozen-time identity suite over seeded random states");
  ids->add_option("--seeds", seeds, "number of seeds");
  ids->add_option("--n", n, "complex dimension");
  ids->add_option("--N", N, "grid points per real axis");
  ids->add_option("--out", id_out, "directory for identities.json");

  std::string config_path, out;
  std::optional<double> fixed_dt;
  auto* run = app.add_subcommand("run", "run the flow from a configuration file");
  run->add_option("--config", config_path, "JSON configuration")->required();
  run->add_option("--out", out, "artifact directory")->required();
  run->add_option("--fixed-dt", fixed_dt, "fixed time step");

  std::string name;
  std::vector<std::string> sets;
  auto* scenario = app.add_subcommand("scenario", "run a named scenario and write verdict.json");
  scenario->add_option("name", name, "scenario name")->required();
  scenario->add_option("--set", sets, "override such as initial.amplitude=0.02 or thresholds.ric_final=1e-5");
  scenario->add_option("--out", out, "artifact directory")->required();

  std::string checkpoint;
  auto* resume = app.add_subcommand("resume", "continue a run from a checkpoint");
  resume->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  resume->add_option("--out", out, "artifact directory, default the run directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    if (*ids) return check_identities(seeds, n, N, id_out);
    if (*run) return run_config(config_path, out, fixed_dt);
    if (*scenario) return run_scenario(name, sets, out);
    if (*resume) return resume_checkpoint(checkpoint, out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  } catch (const krf::CheckpointError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return failure;
  }
  return usage;
}
