#include "krf/flow.hpp"

#include <cmath>
#include <numbers>

#include "krf/spectral.hpp"

namespace krf {

namespace {

ScalarField log_det(const MetricField& g) {
  ScalarField out(g.grid());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = std::log(g.det()[p].real());
  return out;
}

}  // namespace

ScalarField ricci_potential(const MetricField& reference, double c) {
  if (c != 0.0) {
    throw NonexactClass("Ricci potential needs c = 0: c * g~ is not dd-bar exact on the torus");
  }
  ScalarField f = log_det(reference);
  const cplx mean = integrate(f);
  for (auto& v : f.values()) v -= mean;
  return f;
}

FlowContext FlowContext::make(const FlowConfig& config) {
  config.validate(false);
  FlowContext ctx;
  ctx.config = config;
  ctx.grid = Grid::make(config.n, config.N);
  MetricField g0 = metric_from_potential(config.reference.build(ctx.grid), config.margin);
  ctx.log_det_ref = log_det(g0);
  if (config.forcing) {
    ctx.f = config.forcing->build(ctx.grid);
    ctx.custom_forcing = true;
  } else {
    ctx.f = ricci_potential(g0, config.c);
  }
  ctx.ref = make_reference(std::move(g0));
  return ctx;
}

RhsEval evaluate_rhs(const ScalarField& u, const FlowContext& ctx) {
  RhsEval out;
  out.g = MetricField::assemble(potential_components(u, &ctx.ref.metric), ctx.config.margin);
  ScalarField w(ctx.grid);
  const double c = ctx.config.c;
  for (std::size_t p = 0; p < w.size(); ++p) {
    w[p] = std::log(out.g.det()[p].real()) - ctx.log_det_ref[p] + c * u[p] + ctx.f[p];
  }
  if (ctx.config.dealias) w = dealias(w);
  // the right side is real; transform roundoff is checked, then dropped
  if (!(w.max_imag() <= 1e-12 * (1.0 + w.max_abs()))) {
    throw std::logic_error("Monge-Ampere right side is not real");
  }
  out.w = w.real_part();
  return out;
}

ScalarField ma_rhs(const ScalarField& u, const FlowContext& ctx) { return evaluate_rhs(u, ctx).w; }

FlowState make_state(const FlowContext& ctx, double t, ScalarField u, long step, double last_dt) {
  RhsEval e = evaluate_rhs(u, ctx);
  FlowState s;
  s.t = t;
  s.u = std::move(u);
  s.w = std::move(e.w);
  s.g = std::move(e.g);
  s.step = step;
  s.last_dt = last_dt;
  return s;
}

FlowState initial_state(const FlowContext& ctx) {
  try {
    return make_state(ctx, 0.0, ctx.config.initial.build(ctx.grid));
  } catch (const PositivityLoss& e) {
    throw e.at_stage(0);
  }
}

FlowState step(const FlowState& state, double dt, const FlowContext& ctx, ScalarField* failed_potential) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  int stage = 0;
  ScalarField trial;
  auto eval = [&](const ScalarField& u) {
    try {
      return evaluate_rhs(u, ctx);
    } catch (const PositivityLoss& e) {
      if (failed_potential) *failed_potential = u;
      throw e.at_stage(stage);
    }
  };

  const ScalarField& k1 = state.w;
  trial = state.u;
  trial.axpy(0.5 * dt, k1);
  const ScalarField k2 = eval(trial).w;

  stage = 1;
  trial = state.u;
  trial.axpy(0.5 * dt, k2);
  const ScalarField k3 = eval(trial).w;

  stage = 2;
  trial = state.u;
  trial.axpy(dt, k3);
  const ScalarField k4 = eval(trial).w;

  stage = 3;
  ScalarField next = state.u;
  const double sixth = dt / 6.0;
  for (std::size_t p = 0; p < next.size(); ++p) {
    next[p] += sixth * (k1[p] + 2.0 * k2[p] + 2.0 * k3[p] + k4[p]);
  }
  // Roundoff of the update reaches modes the dealiased right side never
  // damps; left alone it random-walks and dominates the curvature late on.
  if (ctx.config.dealias) next = dealias(next).real_part();
  RhsEval e = eval(next);

  FlowState out;
  out.t = state.t + dt;
  out.u = std::move(next);
  out.w = std::move(e.w);
  out.g = std::move(e.g);
  out.step = state.step + 1;
  out.last_dt = dt;
  return out;
}

double stable_dt(const FlowState& state, double cfl) {
  const double lambda = state.g.max_inverse_eigenvalue();
  const double k = std::numbers::pi * state.g.grid().resolution();
  return cfl / (lambda * k * k);
}

}  // namespace krf
