#include "krf/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "krf/checkpoint.hpp"

namespace krf {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::reached_t_end:
      return "reached_t_end";
    case Termination::positivity_loss:
      return "positivity_loss";
    case Termination::nan_detected:
      return "nan_detected";
  }
  return "unknown";
}

Termination termination_from_string(const std::string& s) {
  for (Termination t : {Termination::reached_t_end, Termination::positivity_loss, Termination::nan_detected}) {
    if (to_string(t) == s) return t;
  }
  throw std::invalid_argument("unknown termination reason: " + s);
}

namespace {

bool finite_state(const FlowState& s) { return s.u.all_finite() && s.w.all_finite(); }

QSnapshot q_snapshot(const FlowState& s, const FlowContext& ctx) {
  QSnapshot q;
  q.t = s.t;
  const ScalarField qf = monitor_Q(s.g, ctx.ref);
  const ScalarField sf = monitor_S(s.g, ctx.ref.metric);
  q.q.resize(qf.size());
  q.s.resize(sf.size());
  for (std::size_t p = 0; p < qf.size(); ++p) {
    q.q[p] = qf[p].real();
    q.s[p] = sf[p].real();
  }
  return q;
}

void merge_residuals(std::vector<ResidualReport>& worst, const std::vector<ResidualReport>& fresh) {
  for (const auto& r : fresh) {
    auto it = std::find_if(worst.begin(), worst.end(), [&](const auto& w) { return w.identity == r.identity; });
    if (it == worst.end()) {
      worst.push_back(r);
      continue;
    }
    std::vector<double> times = it->times;
    times.insert(times.end(), r.times.begin(), r.times.end());
    const double ratio_old = it->residual / std::max(it->bound(), 1e-300);
    const double ratio_new = r.residual / std::max(r.bound(), 1e-300);
    const bool pass = it->pass && r.pass;
    if (ratio_new > ratio_old) *it = r;
    it->times = std::move(times);
    it->pass = pass;
  }
}

Breakdown describe_breakdown(const FlowState& last, const PositivityLoss& e, const ScalarField& failed,
                             const FlowContext& ctx) {
  Breakdown b;
  b.t = last.t;
  b.step = last.step;
  b.stage = e.stage();
  b.point = e.point();
  b.eigenvalue = e.eigenvalue();
  b.what = e.what();
  if (failed.valid() && failed.all_finite()) {
    const MetricField g = MetricField::unchecked(potential_components(failed, &ctx.ref.metric));
    b.c_eq = pinch_eigenvalues(g, ctx.ref.metric).c_eq;
  } else {
    b.c_eq = std::numeric_limits<double>::infinity();
  }
  return b;
}

RunResult run_from(const FlowContext& ctx, FlowState state, RunResult result, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const FlowConfig& cfg = ctx.config;
  result.custom_forcing = ctx.custom_forcing;
  const double t_end = cfg.t_end;
  const double t_eps = 1e-12 * t_end;

  std::optional<FlowState> prev;  // state before `state`, kept while a window is open
  bool window_open = false;

  auto finish = [&](Termination t) {
    result.termination = t;
    result.steps = state.step;
    result.final_state = state;
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
  };

  while (state.t < t_end - t_eps) {
    double dt = window_open ? state.last_dt : (cfg.dt_fixed ? *cfg.dt_fixed : stable_dt(state, cfg.cfl));
    if (state.t + dt > t_end - t_eps) {
      dt = t_end - state.t;
      window_open = false;  // unequal spacing: no window at this record
    }

    ScalarField failed;
    FlowState next;
    try {
      next = step(state, dt, ctx, &failed);
    } catch (const PositivityLoss& e) {
      result.breakdown = describe_breakdown(state, e, failed, ctx);
      return finish(Termination::positivity_loss);
    } catch (const NonFiniteValues& e) {
      Breakdown b;
      b.t = state.t;
      b.step = state.step;
      b.c_eq = std::numeric_limits<double>::infinity();
      b.what = e.what();
      result.breakdown = b;
      return finish(Termination::nan_detected);
    }
    if (!finite_state(next)) {
      Breakdown b;
      b.t = next.t;
      b.step = next.step;
      b.c_eq = std::numeric_limits<double>::infinity();
      b.what = "non-finite values after step";
      result.breakdown = b;
      return finish(Termination::nan_detected);
    }

    if (window_open) {
      Window w{std::move(*prev), std::move(state), std::move(next)};
      merge_residuals(result.residuals, evolution_residuals(w, ctx));
      if (options.collect_q) result.q_windows.push_back(q_evolution_decomposition(w, ctx));
      state = std::move(w.mid);
      next = std::move(w.next);
      window_open = false;
    }
    prev = std::move(state);
    state = std::move(next);
    if (options.on_step) options.on_step(state);

    const bool at_end = state.t >= t_end - t_eps;
    if (state.step % cfg.cadence == 0 || at_end) {
      result.records.push_back(make_record(state, ctx));
      if (options.collect_q) result.q_snapshots.push_back(q_snapshot(state, ctx));
      window_open = !at_end;
    }
    if (cfg.checkpoint_every > 0 && state.step % cfg.checkpoint_every == 0 && !window_open &&
        !options.checkpoint_dir.empty()) {
      save_checkpoint(options.checkpoint_dir / ("step_" + std::to_string(state.step) + ".ckpt"),
                      make_checkpoint(state, result));
    }
    if (!window_open) prev.reset();
  }
  return finish(Termination::reached_t_end);
}

}  // namespace

RunResult run(const FlowConfig& config, const RunOptions& options) {
  config.validate(true);
  const FlowContext ctx = FlowContext::make(config);
  RunResult result;
  result.config = config;
  FlowState state;
  try {
    state = initial_state(ctx);
  } catch (const PositivityLoss& e) {
    Breakdown b;
    b.stage = e.stage();
    b.point = e.point();
    b.eigenvalue = e.eigenvalue();
    b.what = e.what();
    const ScalarField u0 = config.initial.build(ctx.grid);
    b.c_eq = pinch_eigenvalues(MetricField::unchecked(potential_components(u0, &ctx.ref.metric)), ctx.ref.metric).c_eq;
    result.breakdown = b;
    result.termination = Termination::positivity_loss;
    return result;
  }
  result.f_sup = state.w.max_abs();
  result.records.push_back(make_record(state, ctx));
  if (options.collect_q) result.q_snapshots.push_back(q_snapshot(state, ctx));
  return run_from(ctx, std::move(state), std::move(result), options);
}

RunResult resume(const Checkpoint& ckpt, const RunOptions& options) {
  ckpt.config.validate(true);
  const FlowContext ctx = FlowContext::make(ckpt.config);
  FlowState state = make_state(ctx, ckpt.t, ckpt.u, ckpt.step, ckpt.last_dt);
  if (!std::equal(state.w.values().begin(), state.w.values().end(), ckpt.w.values().begin(), ckpt.w.values().end())) {
    throw CheckpointError("checkpoint velocity does not match its potential");
  }
  RunResult result;
  result.config = ckpt.config;
  result.records = ckpt.records;
  result.residuals = ckpt.residuals;
  result.f_sup = ckpt.f_sup;
  return run_from(ctx, std::move(state), std::move(result), options);
}

WBoundReport w_bound_check(const std::vector<double>& t, const std::vector<double>& w_sup, double c, double f_sup,
                           double slack) {
  WBoundReport r;
  r.f_sup = f_sup;
  r.worst_margin = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double margin = w_sup[i] - std::exp(c * t[i]) * f_sup;
    r.worst_margin = std::max(r.worst_margin, margin);
    if (margin > slack) ++r.violations;
    if (i > 0 && w_sup[i] > w_sup[i - 1] + slack) r.non_increasing = false;
  }
  r.pass = r.violations == 0;
  return r;
}

WBoundReport w_bound_check(const RunResult& run, double slack) {
  std::vector<double> t, w;
  for (const auto& r : run.records) {
    t.push_back(r.t);
    w.push_back(r.w_sup);
  }
  return w_bound_check(t, w, run.config.c, run.f_sup, slack);
}

std::vector<ShiFit> fit_shi(const RunResult& run) {
  std::vector<ShiFit> fits;
  if (run.records.empty()) throw EmptySeries("run has no monitor records");
  const double t_split = run.config.t_split_fraction * run.config.t_end;
  std::vector<double> t;
  for (const auto& r : run.records) t.push_back(r.t);
  for (std::size_t k = 0; k < run.records.front().rm_sup.size(); ++k) {
    std::vector<double> v;
    for (const auto& r : run.records) v.push_back(r.rm_sup[k]);
    fits.push_back(shi_fit(t, v, static_cast<int>(k), t_split));
  }
  return fits;
}

ConstantsFit fit_q_constants(const std::vector<QDecomposition>& windows) {
  if (windows.empty()) throw EmptySeries("no Q windows were collected");
  ConstantsFit fit;
  std::vector<double> q, rem;
  double q_sup = 0.0;
  for (const auto& w : windows) {
    for (std::size_t p = 0; p < w.q.size(); ++p) {
      if (!w.valid[p]) continue;
      q.push_back(w.q[p]);
      rem.push_back(std::abs(w.remainder[p]));
      q_sup = std::max(q_sup, w.q[p]);
    }
    fit.excluded += w.excluded;
  }
  fit.q_points = q.size();
  fit.t_min = windows.front().t;
  fit.t_max = windows.back().t;
  const LinearEnvelope env = fit_linear_envelope(q, rem);
  fit.c3 = env.slope;
  fit.c4 = env.intercept;

  // c1 from the quadratic term of the S identity, C2 from the measured heat operator
  fit.c1 = std::numeric_limits<double>::infinity();
  for (const auto& w : windows) {
    for (std::size_t p = 0; p < w.q.size(); ++p) {
      if (w.valid[p] && w.q[p] > 1e-12 * q_sup) fit.c1 = std::min(fit.c1, w.quad_s[p] / w.q[p]);
    }
  }
  if (!std::isfinite(fit.c1) || fit.c1 <= 0.0) fit.c1 = 1.0;
  fit.c2 = -std::numeric_limits<double>::infinity();
  for (const auto& w : windows) {
    for (std::size_t p = 0; p < w.q.size(); ++p) {
      if (w.valid[p]) fit.c2 = std::max(fit.c2, w.heat_s[p] + fit.c1 * w.q[p]);
    }
  }
  fit.c2 = std::max(fit.c2, 0.0);
  fit.c5 = (1.0 + fit.c3) / fit.c1;
  fit.c6 = 0.0;
  for (const auto& w : windows) {
    for (std::size_t p = 0; p < w.q.size(); ++p) {
      if (!w.valid[p]) continue;
      const double x = w.q[p] + fit.c5 * w.s[p];
      const double heat = w.heat_q[p] + fit.c5 * w.heat_s[p];
      fit.c6 = std::max(fit.c6, heat + x);
    }
  }
  return fit;
}

QBoundReport q_plus_c5s_check(const RunResult& run, const ConstantsFit& fit, double tolerance) {
  if (run.q_snapshots.empty()) throw EmptySeries("run has no Q snapshots");
  QBoundReport r;
  r.c5 = fit.c5;
  r.c6 = fit.c6;
  auto sup = [&](const QSnapshot& s) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < s.q.size(); ++p) m = std::max(m, s.q[p] + fit.c5 * s.s[p]);
    return m;
  };
  r.initial_sup = sup(run.q_snapshots.front());
  r.run_sup = r.initial_sup;
  for (const auto& s : run.q_snapshots) r.run_sup = std::max(r.run_sup, sup(s));
  for (const auto& w : run.q_windows) {
    for (std::size_t p = 0; p < w.q.size(); ++p) {
      if (!w.valid[p]) continue;
      const double x = w.q[p] + fit.c5 * w.s[p];
      const double heat = w.heat_q[p] + fit.c5 * w.heat_s[p];
      if (heat > -x + fit.c6 + tolerance * (1.0 + std::abs(fit.c6))) ++r.inequality_violations;
    }
  }
  r.pass = r.run_sup <= std::max(r.initial_sup, r.c6) + tolerance && r.inequality_violations == 0;
  return r;
}

Theorem1Verdict theorem1_verdict(const RunResult& run) {
  Theorem1Verdict v;
  v.c_eq_bound = run.config.ceq_bound;
  v.completed = run.termination == Termination::reached_t_end;
  if (!run.records.empty()) {
    v.c_eq_initial = run.records.front().c_eq;
    for (const auto& r : run.records) v.c_eq_max = std::max(v.c_eq_max, r.c_eq);
  }
  if (v.completed) {
    v.fits = fit_shi(run);
    for (const auto& f : v.fits) v.coverage_violations += f.violations;
    v.pass = std::isfinite(v.c_eq_max) && v.coverage_violations == 0;
  } else if (run.breakdown) {
    v.c_eq_at_breakdown = run.breakdown->c_eq;
    if (!run.records.empty()) {
      v.fits = fit_shi(run);
      for (const auto& f : v.fits) v.coverage_violations += f.violations;
    }
    v.pass = run.termination == Termination::positivity_loss && run.breakdown->c_eq > v.c_eq_bound;
  }
  return v;
}

}  // namespace krf
