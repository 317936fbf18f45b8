#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "krf/fits.hpp"
#include "krf/monitors.hpp"

namespace krf {

enum class Termination { reached_t_end, positivity_loss, nan_detected };
std::string to_string(Termination t);
Termination termination_from_string(const std::string& s);

struct Breakdown {
  double t = 0.0;  // time of the last accepted state
  long step = 0;
  int stage = -1;
  std::size_t point = 0;
  double eigenvalue = 0.0;
  // equivalence constant of the failing stage metric against the reference;
  // infinite once an eigenvalue has crossed zero
  double c_eq = 0.0;
  std::string what;
};

// Pointwise Q and S at a monitor record, kept for the Q + C5 S check.
struct QSnapshot {
  double t = 0.0;
  std::vector<double> q, s;
};

struct RunOptions {
  bool collect_q = false;
  std::filesystem::path checkpoint_dir;  // checkpoints are written when config.checkpoint_every > 0
  std::function<void(const FlowState&)> on_step;
};

struct RunResult {
  FlowConfig config;
  std::vector<MonitorRecord> records;
  // worst window per evolution identity, by residual / bound
  std::vector<ResidualReport> residuals;
  Termination termination = Termination::reached_t_end;
  std::optional<Breakdown> breakdown;
  double f_sup = 0.0;  // sup |w(0)|
  bool custom_forcing = false;
  long steps = 0;
  double wall_seconds = 0.0;  // stdout only, never written to artifacts
  std::vector<QDecomposition> q_windows;
  std::vector<QSnapshot> q_snapshots;
  FlowState final_state;
};

struct Checkpoint;

RunResult run(const FlowConfig& config, const RunOptions& options = {});
RunResult resume(const Checkpoint& checkpoint, const RunOptions& options = {});

// sup |w|(t) <= e^{ct} sup|f| + slack at every record, where f is the
// forcing of the equation started from u(0), i.e. w(0).
struct WBoundReport {
  double f_sup = 0.0;
  double worst_margin = 0.0;  // max of w_sup - bound, <= slack on success
  std::size_t violations = 0;
  bool non_increasing = true;  // sup |w| along the records
  bool pass = true;
};
WBoundReport w_bound_check(const std::vector<double>& t, const std::vector<double>& w_sup, double c, double f_sup,
                           double slack = 1e-8);
WBoundReport w_bound_check(const RunResult& run, double slack = 1e-8);

struct ConstantsFit {
  std::vector<ShiFit> shi;  // k = 0..k_max on sup |nabla^k Rm|^2
  double c3 = 0.0, c4 = 0.0;  // |remainder| <= C3 Q + C4
  double c1 = 0.0, c2 = 0.0;  // (d/dt - Lap) S <= -c1 Q + C2
  double c5 = 0.0, c6 = 0.0;  // (d/dt - Lap)(Q + C5 S) <= -(Q + C5 S) + C6
  std::size_t q_points = 0, excluded = 0;
  double t_min = 0.0, t_max = 0.0;
};

std::vector<ShiFit> fit_shi(const RunResult& run);

// Fits C3, C4 from the remainder, c1 and C2 from the S identity, then
// C5 = (1 + C3) / c1 and the minimal C6.
ConstantsFit fit_q_constants(const std::vector<QDecomposition>& windows);

struct QBoundReport {
  double c5 = 0.0, c6 = 0.0;
  double initial_sup = 0.0;
  double run_sup = 0.0;
  std::size_t inequality_violations = 0;
  bool pass = true;
};
// Checks sup_t max_x (Q + C5 S) <= max(initial sup, C6) + tolerance and that
// the fitted inequality holds at every sampled point.
QBoundReport q_plus_c5s_check(const RunResult& run, const ConstantsFit& fit, double tolerance = 1e-6);

struct Theorem1Verdict {
  bool completed = false;
  double c_eq_initial = 1.0;
  double c_eq_max = 1.0;
  std::vector<ShiFit> fits;
  std::size_t coverage_violations = 0;
  std::optional<double> c_eq_at_breakdown;
  double c_eq_bound = 0.0;
  bool pass = false;
};
Theorem1Verdict theorem1_verdict(const RunResult& run);

}  // namespace krf
