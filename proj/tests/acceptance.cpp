#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "krf/report.hpp"
#include "krf/scenarios.hpp"

using namespace krf;
namespace fs = std::filesystem;

namespace {

struct Line {
  int criterion;
  bool pass;
  std::string detail;
};

std::vector<Line> lines;

void report(int criterion, bool pass, const std::string& detail) {
  lines.push_back({criterion, pass, detail});
  std::printf("criterion %d %s: %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

template <class F>
auto timed(double& seconds, F&& fn) {
  const auto start = std::chrono::steady_clock::now();
  auto out = fn();
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

const ScenarioCheck* find(const ScenarioOutcome& o, const std::string& name) {
  for (const auto& c : o.checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

bool checks_pass(const ScenarioOutcome& o, const std::vector<std::string>& names) {
  for (const auto& n : names) {
    const ScenarioCheck* c = find(o, n);
    if (!c || !c->pass) return false;
  }
  return true;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

double flow_residual(const FlowContext& ctx, const FlowState& start, double h, double* bound) {
  FlowState mid = step(start, h, ctx);
  FlowState next = step(mid, h, ctx);
  const Window w{start, std::move(mid), std::move(next)};
  for (const auto& r : evolution_residuals(w, ctx)) {
    if (r.identity == "flow_equation") {
      *bound = r.bound();
      return r.residual;
    }
  }
  return NAN;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "krf_acceptance";
  fs::remove_all(out);

  // 1
  {
    double seconds = 0.0;
    const ScenarioOutcome o =
        timed(seconds, [&] { return run_scenario("identity_suite", scenario_defaults("identity_suite"), out / "identity_suite"); });
    write_verdict(o, out / "identity_suite");
    std::size_t checks = 0;
    double worst = 0.0;
    for (const auto& s : o.suites) {
      checks += s.checks.size();
      for (const auto& c : s.checks) worst = std::max(worst, c.residual / (1.0 + c.scale));
    }
    const bool shape = o.suites.size() == 2 && o.suites[0].n == 1 && o.suites[0].N == 64 && o.suites[0].seeds >= 10 &&
                       o.suites[1].n == 2 && o.suites[1].N == 32 && o.suites[1].seeds >= 3;
    report(1, o.pass && shape && seconds <= 120.0,
           fmt("%zu two-path checks, worst residual/(1+scale) %.2e <= 1e-8, %.0f s <= 120 s", checks, worst, seconds));
  }

  // 5, with the trajectory reused by 2, 3, 4, 7 and 8
  double cao_seconds = 0.0;
  const ScenarioOutcome cao = timed(cao_seconds, [&] {
    return run_scenario("cao_convergence", scenario_defaults("cao_convergence"), out / "cao_convergence");
  });
  write_verdict(cao, out / "cao_convergence");
  const RunResult& cao_run = cao.runs.at(0);
  {
    const bool ok = checks_pass(cao, {"reached_t_end", "rm_decay", "ric_final", "c_eq_rise"}) && cao_seconds <= 300.0;
    report(5, ok,
           fmt("reached t_end, |Rm| decay %.3g >= 100, final |Ric| %.2e < 1e-4, C_eq rise after 5%% %.1e, %.0f s <= 300 s",
               find(cao, "rm_decay")->value, find(cao, "ric_final")->value, find(cao, "c_eq_rise")->value, cao_seconds));
  }

  // 2
  {
    const ScenarioCheck* r = find(cao, "flow_equation_residual");
    const FlowContext ctx = FlowContext::make(cao_run.config);
    FlowState s0 = initial_state(ctx);
    while (s0.t < 0.01) s0 = step(s0, stable_dt(s0, cao_run.config.cfl), ctx);
    const double h = 4.0 * stable_dt(s0, 1.0);
    double b1 = 0.0, b2 = 0.0;
    const double r1 = flow_residual(ctx, s0, h, &b1);
    const double r2 = flow_residual(ctx, s0, h / 2, &b2);
    const double order = std::log2(r1 / r2);
    const bool ok = r && r->pass && r1 <= b1 && r2 <= b2 && order >= 1.9;
    report(2, ok,
           fmt("trajectory residual %.2e <= bound %.2e; at t = %.3g halving dt from %.2e: %.2e -> %.2e, order %.2f >= 1.9",
               r ? r->value : NAN, r ? r->threshold : NAN, s0.t, h, r1, r2, order));
  }

  double shi_seconds = 0.0;
  const ScenarioOutcome shi = timed(shi_seconds, [&] {
    return run_scenario("shi_smoothing", scenario_defaults("shi_smoothing"), out / "shi_smoothing");
  });
  write_verdict(shi, out / "shi_smoothing");

  const ScenarioOutcome probe =
      run_scenario("breakdown_probe", scenario_defaults("breakdown_probe"), out / "breakdown_probe");
  write_verdict(probe, out / "breakdown_probe");

  const QConstantsStudy study = q_constants_study(q_study_config(), {1, 2, 3, 4, 5});

  // 9, whose runs also feed 3 and 7
  std::vector<RunResult> det_runs;
  bool identical = false;
  {
    FlowConfig c = config_from_json(scenario_defaults("cao_convergence").at("config"));
    c.t_end = 0.02;
    c.dt_fixed = 2e-5;
    c.cadence = 50;
    for (const char* label : {"a", "b"}) {
      det_runs.push_back(run(c));
      write_run_artifacts(det_runs.back(), out / "determinism" / label);
    }
    identical = slurp(out / "determinism/a/monitors.csv") == slurp(out / "determinism/b/monitors.csv") &&
                slurp(out / "determinism/a/summary.json") == slurp(out / "determinism/b/summary.json") &&
                !det_runs[0].records.empty();
  }

  // 3
  {
    std::vector<std::pair<std::string, const RunResult*>> runs{{"cao", &cao_run}};
    for (std::size_t i = 0; i < shi.runs.size(); ++i) runs.push_back({"shi " + shi.labels[i], &shi.runs[i]});
    for (std::size_t i = 0; i < det_runs.size(); ++i) runs.push_back({"fixed-step", &det_runs[i]});
    bool ok = true;
    std::size_t samples = 0;
    double worst = -INFINITY;
    for (const auto& [name, r] : runs) {
      const WBoundReport w = w_bound_check(*r, 1e-8);
      ok = ok && w.pass;
      samples += r->records.size();
      worst = std::max(worst, w.worst_margin);
    }
    RunResult perturbed = cao_run;
    perturbed.records[perturbed.records.size() / 2].w_sup = perturbed.f_sup + 1e-6;
    const bool detected = !w_bound_check(perturbed, 1e-8).pass;
    const auto& bw = probe.fitted.at("w_bound");
    report(3, ok && detected,
           fmt("%zu samples over %zu completed runs, worst sup|w| - sup|f| = %.2e <= 1e-8; perturbed w detected: %s; "
               "breakdown probe (not a flow solution) exceeds the bound by %.3f from t = %.4g",
               samples, runs.size(), worst, detected ? "yes" : "no", bw.at("worst_margin").get<double>(),
               bw.at("first_violation_t").get<double>()));
  }

  // 4
  {
    bool ok = true;
    double vol = 0.0, gb = 0.0;
    std::size_t snapshots = 0;
    std::vector<const RunResult*> runs{&cao_run};
    for (const auto& r : shi.runs) runs.push_back(&r);
    for (const auto& r : det_runs) runs.push_back(&r);
    for (const RunResult* r : runs) {
      const double v0 = r->records.front().volume;
      for (const auto& rec : r->records) {
        vol = std::max(vol, std::abs(rec.volume / v0 - 1.0));
        gb = std::max(gb, std::abs(rec.gauss_bonnet));
        ++snapshots;
      }
    }
    ok = vol <= 1e-8 && gb <= 1e-10;
    report(4, ok, fmt("%zu snapshots: volume drift %.2e <= 1e-8, |Gauss-Bonnet| %.2e <= 1e-10", snapshots, vol, gb));
  }

  // 6
  {
    double b64 = NAN, b128 = NAN;
    for (const auto& f : shi.fitted.at("shi")) {
      if (f.at("N") == 64) b64 = f.at("B").get<double>();
      if (f.at("N") == 128) b128 = f.at("B").get<double>();
    }
    report(6, shi.pass,
           fmt("t |nabla Rm|^2 bounded on [1e-3, 1e-1]; B1 = %.4g (N=64), %.4g (N=128), spread %.3f <= 0.3, %.0f s",
               b64, b128, find(shi, "b1_relative_spread")->value, shi_seconds));
  }

  // 7
  {
    std::vector<const RunResult*> runs{&cao_run};
    for (const auto& r : shi.runs) runs.push_back(&r);
    for (const auto& r : det_runs) runs.push_back(&r);
    bool ok = true;
    std::size_t covered = 0, violations = 0;
    for (const RunResult* r : runs) {
      const Theorem1Verdict v = theorem1_verdict(*r);
      ok = ok && v.completed && v.pass && v.fits.size() == 3;
      for (const auto& f : v.fits) {
        covered += f.samples;
        violations += f.violations;
      }
    }
    const Theorem1Verdict pv = theorem1_verdict(probe.runs.at(0));
    const double c_eq = pv.c_eq_at_breakdown.value_or(0.0);
    ok = ok && violations == 0 && probe.pass && c_eq > pv.c_eq_bound;
    report(7, ok,
           fmt("%zu completed runs, %zu envelope samples for k = 0..2, %zu uncovered; probe: %s at step %ld, C_eq %s > %g",
               runs.size(), covered, violations, to_string(probe.runs[0].termination).c_str(),
               probe.runs[0].breakdown ? probe.runs[0].breakdown->step : -1L, format_double(c_eq).c_str(),
               pv.c_eq_bound));
  }

  // 8
  {
    const bool stable = study.c3_spread <= 2.0 && study.c4_spread <= 2.0;
    const bool bound = checks_pass(cao, {"q_plus_c5s_sup", "q_inequality_violations"});
    double c3_lo = INFINITY, c3_hi = 0.0;
    for (const auto& f : study.fits) {
      c3_lo = std::min(c3_lo, f.c3);
      c3_hi = std::max(c3_hi, f.c3);
    }
    report(8, stable && bound,
           fmt("C3 in [%.4g, %.4g] spread %.2f, C4 spread %.2f over 5 seeds (<= 2); Cao sup(Q + C5 S) %.6g <= %.6g",
               c3_lo, c3_hi, study.c3_spread, study.c4_spread, find(cao, "q_plus_c5s_sup")->value,
               find(cao, "q_plus_c5s_sup")->threshold));
  }

  // 9
  report(9, identical, fmt("two fixed-step runs of %zu records: monitors.csv and summary.json byte-identical: %s",
                           det_runs[0].records.size(), identical ? "yes" : "no"));

  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return a.criterion < b.criterion; });
  bool all = true;
  std::printf("\nsummary\n");
  for (const auto& l : lines) {
    std::printf("criterion %d %s\n", l.criterion, l.pass ? "PASS" : "FAIL");
    all = all && l.pass;
  }
  return all ? 0 : 1;
}
