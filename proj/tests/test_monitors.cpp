#include <doctest.h>

#include <cmath>

#include "krf/monitors.hpp"
#include "krf/run.hpp"
#include "test_support.hpp"

using namespace krf;
using krf::test::max_diff;
using krf::test::pi;
using krf::test::scaled_potential;

namespace {

struct Sample {
  Reference ref;
  MetricField g;
};

Sample sample(int n, int N, std::uint64_t seed) {
  const Grid grid = Grid::make(n, N);
  Reference ref = make_reference(metric_from_potential(scaled_potential(grid, 1, 0.05, 100 + seed)));
  MetricField g = metric_from_potential(scaled_potential(grid, 1, 0.1, seed), ref.metric);
  return {std::move(ref), std::move(g)};
}

FlowConfig flow_config(int n, int N) {
  FlowConfig c;
  c.n = n;
  c.N = N;
  c.reference = {PotentialSpec::Kind::bandlimited, 1, 0.02, 11, 0};
  c.initial = {PotentialSpec::Kind::bandlimited, 1, 0.03, 4, 0};
  return c;
}

Window window(const FlowContext& ctx, double dt, int warmup = 0) {
  FlowState s = initial_state(ctx);
  for (int i = 0; i < warmup; ++i) s = step(s, dt, ctx);
  FlowState mid = step(s, dt, ctx);
  FlowState next = step(mid, dt, ctx);
  return {std::move(s), std::move(mid), std::move(next)};
}

double residual_of(const std::vector<ResidualReport>& reports, const std::string& name) {
  for (const auto& r : reports) {
    if (r.identity == name) return r.residual;
  }
  FAIL("missing report " << name);
  return 0.0;
}

}  // namespace

TEST_CASE("S is the trace of the eigenvalues of g against g0") {
  for (int n : {1, 2}) {
    const Sample s = sample(n, n == 1 ? 32 : 16, 3);
    const ScalarField S = monitor_S(s.g, s.ref.metric);
    const PinchReport pinch = pinch_eigenvalues(s.g, s.ref.metric);
    double worst = 0.0;
    for (std::size_t p = 0; p < S.size(); ++p) {
      double sum = 0.0;
      for (int k = 0; k < n; ++k) sum += pinch.eigenvalues[p * n + k];
      worst = std::max(worst, std::abs(S[p] - sum));
      CHECK(S[p].real() >= n * pinch.lambda_min - 1e-12);
      CHECK(S[p].real() <= n * pinch.lambda_max + 1e-12);
    }
    CHECK(worst < 1e-12);
    CHECK(S.max_imag() < 1e-14);
  }
}

TEST_CASE("Q is non-negative and vanishes on constant multiples of g0") {
  for (int n : {1, 2}) {
    const Sample s = sample(n, n == 1 ? 32 : 16, 5);
    const ScalarField Q = monitor_Q(s.g, s.ref);
    CHECK(Q.min_real() >= 0.0);
    CHECK(Q.max_real() > 1e-4);
    CHECK(Q.max_imag() <= 1e-12 * Q.max_real());
    CHECK(monitor_Q(s.ref.metric.scaled(2.0), s.ref).max_abs() < 1e-20);
  }
}

TEST_CASE("Q against Q1 is controlled by the eigenvalue pinch") {
  // Q1 carries the holomorphic and antiholomorphic directions, which have
  // equal norms; the three metric slots of Q give the cube of the pinch.
  for (int n : {1, 2}) {
    const Sample s = sample(n, n == 1 ? 32 : 16, 7);
    const ScalarField Q = monitor_Q(s.g, s.ref);
    const ScalarField Q1 = monitor_Qm(s.g, s.ref, 1);
    const PinchReport pinch = pinch_eigenvalues(s.g, s.ref.metric);
    const double lo = std::pow(pinch.lambda_max, -3), hi = std::pow(pinch.lambda_min, -3);
    for (std::size_t p = 0; p < Q.size(); ++p) {
      const double half = 0.5 * Q1[p].real();
      CHECK(Q[p].real() >= lo * half * (1 - 1e-10) - 1e-14);
      CHECK(Q[p].real() <= hi * half * (1 + 1e-10) + 1e-14);
    }
  }
}

TEST_CASE("square sums agree between the normal frame and the tensorial form") {
  const FlowContext ctx = FlowContext::make(flow_config(2, 16));
  const Window w = window(ctx, 1e-4);
  const QDecomposition d = q_evolution_decomposition(w, ctx);
  const auto [s1, s2] = q_squares_tensorial(w.mid.g, ctx.ref);
  double scale = 0.0, worst = 0.0;
  for (std::size_t p = 0; p < d.q.size(); ++p) {
    if (!d.valid[p]) continue;
    scale = std::max({scale, d.square1[p], d.square2[p]});
    worst = std::max({worst, std::abs(d.square1[p] - s1[p].real()), std::abs(d.square2[p] - s2[p].real())});
  }
  CHECK(d.excluded == 0);
  CHECK(scale > 0.0);
  CHECK(worst <= 1e-9 * (1.0 + scale));
}

TEST_CASE("evolution residuals fall at second order in the window spacing") {
  const FlowContext ctx = FlowContext::make(flow_config(1, 32));
  const double h = 4e-4;
  const auto coarse = evolution_residuals(window(ctx, h), ctx);
  const auto fine = evolution_residuals(window(ctx, h / 2), ctx);
  for (const auto& r : coarse) CHECK_MESSAGE(r.pass, r.identity);
  for (const auto& r : fine) CHECK_MESSAGE(r.pass, r.identity);
  const double order = std::log2(residual_of(coarse, "flow_equation") / residual_of(fine, "flow_equation"));
  MESSAGE("flow equation order " << order);
  CHECK(order >= 1.9);
}

TEST_CASE("w bound on samples") {
  const std::vector<double> t{0.0, 0.1, 0.2};
  CHECK(w_bound_check(t, {0.3, 0.2, 0.1}, 0.0, 0.3).pass);
  const WBoundReport bad = w_bound_check(t, {0.3, 0.31, 0.1}, 0.0, 0.3);
  CHECK_FALSE(bad.pass);
  CHECK(bad.violations == 1);
  CHECK(bad.worst_margin == doctest::Approx(0.01));
  CHECK_FALSE(bad.non_increasing);
}

TEST_CASE("w bound along a forced run and its perturbed negative control") {
  FlowConfig c;
  c.N = 32;
  c.t_end = 0.01;
  c.cadence = 10;
  c.forcing = PotentialSpec{PotentialSpec::Kind::cosine, 1, 0.3, 0, 0};
  RunResult r = run(c);
  REQUIRE(r.termination == Termination::reached_t_end);
  CHECK(r.f_sup == doctest::Approx(0.3).epsilon(1e-12));
  const WBoundReport ok = w_bound_check(r);
  CHECK(ok.pass);
  CHECK(ok.non_increasing);
  r.records[r.records.size() / 2].w_sup = 0.3 + 1e-6;
  CHECK_FALSE(w_bound_check(r).pass);
}

TEST_CASE("maximum principle at the grid argmax") {
  const Grid grid = Grid::make(1, 32);
  const MetricField g = metric_from_potential(scaled_potential(grid, 1, 0.1, 9));
  const ScalarField h = ScalarField::from_function(grid, [](auto x) {
    return std::cos(2 * pi * x[0]) + 0.5 * std::cos(2 * pi * x[1]);
  });
  const MaxPrincipleReport r = max_principle_check(h, g);
  CHECK(r.pass);
  CHECK(r.value == doctest::Approx(1.5));
  CHECK(r.laplacian < 0.0);
  CHECK(r.gradient <= r.gradient_tolerance);
}
