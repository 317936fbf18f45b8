#pragma once

#include <stdexcept>

#include "krf/config.hpp"
#include "krf/geometry.hpp"

namespace krf {

// c * g~ is not dd-bar exact on the torus unless c == 0.
class NonexactClass : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// f = log(det g~ / det flat) - mean, so that dz dzbar f = -Ric(g~).
ScalarField ricci_potential(const MetricField& reference, double c = 0.0);

// Everything that stays fixed along a trajectory.
struct FlowContext {
  FlowConfig config;
  Grid grid;
  Reference ref;            // g~ (= g0 for the monitors), its connection and curvature
  ScalarField f;            // forcing term of the Monge-Ampere equation
  ScalarField log_det_ref;  // log det g~
  bool custom_forcing = false;

  static FlowContext make(const FlowConfig& config);
};

struct FlowState {
  double t = 0.0;
  ScalarField u;   // potential, g = g~ + dd-bar u
  ScalarField w;   // u_t = ma_rhs(u)
  MetricField g;
  long step = 0;
  double last_dt = 0.0;
};

struct RhsEval {
  ScalarField w;
  MetricField g;
};

// u_t = log(det(g~ + dd-bar u) / det g~) + c u + f, with the 2/3 rule applied
// to the result when the configuration asks for dealiasing.
RhsEval evaluate_rhs(const ScalarField& u, const FlowContext& ctx);
ScalarField ma_rhs(const ScalarField& u, const FlowContext& ctx);

FlowState make_state(const FlowContext& ctx, double t, ScalarField u, long step = 0, double last_dt = 0.0);
FlowState initial_state(const FlowContext& ctx);

// One classical RK4 step.  Throws PositivityLoss tagged with the failing stage
// (0..3, where 3 is the final assembly); `failed_potential`, when given,
// receives the potential whose metric was inadmissible.
FlowState step(const FlowState& state, double dt, const FlowContext& ctx,
               ScalarField* failed_potential = nullptr);

// cfl / (Lambda (pi N)^2) with Lambda the largest eigenvalue of g^{jbar i}.
double stable_dt(const FlowState& state, double cfl);

}  // namespace krf
