#include "krf/identities.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "krf/spectral.hpp"

namespace krf {

namespace {

double max_diff(const TensorField& a, const TensorField& b) {
  double m = 0.0;
  for (std::size_t c = 0; c < a.components(); ++c) {
    const auto& x = a.comp(c);
    const auto& y = b.comp(c);
    for (std::size_t p = 0; p < x.size(); ++p) m = std::max(m, std::norm(x[p] - y[p]));
  }
  return std::sqrt(m);
}

IdentityCheck make_check(std::string identity, std::uint64_t seed, double residual, double scale) {
  IdentityCheck c;
  c.identity = std::move(identity);
  c.seed = seed;
  c.residual = residual;
  c.scale = scale;
  c.pass = residual <= c.tolerance * (1.0 + scale);
  return c;
}

}  // namespace

ScalarField potential_with_hessian(const Grid& grid, int K, double delta, std::uint64_t seed) {
  ScalarField phi = random_bandlimited(grid, K, 1.0, seed);
  double h = 0.0;
  for (const auto& d : ddbar_all(phi)) h = std::max(h, d.max_abs());
  phi *= delta / h;
  return phi;
}

// Products with the inverse metric must stay resolved for the discrete
// product rule to hold to 1e-8, which bounds band limit and size.
IdentityState identity_state(const Grid& grid, std::uint64_t seed) {
  const bool surface = grid.dim() == 1;
  Reference ref = make_reference(metric_from_potential(potential_with_hessian(grid, 1, 0.05, 1000 + seed)));
  MetricField g = metric_from_potential(potential_with_hessian(grid, surface ? 2 : 1, surface ? 0.1 : 0.05, seed),
                                        ref.metric);
  return {std::move(ref), std::move(g)};
}

std::vector<IdentityCheck> check_state(const IdentityState& state, int conversion_order, std::uint64_t seed) {
  const MetricField& g = state.g;
  const Reference& ref = state.ref;
  std::vector<IdentityCheck> out;

  const TensorField direct = curvature_direct(g);
  const double scale = direct.max_abs();
  out.push_back(make_check("curvature_two_path", seed, max_diff(curvature_via_ref(g, ref), direct), scale));
  out.push_back(make_check("kahler_symmetry", seed, kahler_symmetry_residual(direct), scale));
  out.push_back(make_check("trace_identity", seed, trace_identity_residual(g, ref), scale));
  out.push_back(make_check("ricci_trace", seed, max_diff(ricci(g), ricci_trace(direct, g)), scale));

  if (conversion_order > 0) {
    const Connection diff = difference_tensor(g, ref);
    const Connection gamma = christoffel(g);
    std::vector<double> residual(conversion_order + 1, 0.0), size(conversion_order + 1, 0.0);
    // Depth first, one direction pattern at a time, to bound memory at n = 2.
    std::function<void(const TensorField&, const TensorField&, int)> visit =
        [&](const TensorField& assembled, const TensorField& explicit_conn, int depth) {
          if (depth > 0) {
            residual[depth] = std::max(residual[depth], max_diff(assembled, explicit_conn));
            size[depth] = std::max(size[depth], explicit_conn.max_abs());
          }
          if (depth == conversion_order) return;
          for (Slot s : {Slot::holo, Slot::anti}) {
            visit(covderiv_evolving(assembled, s, ref, diff), covderiv(explicit_conn, s, &gamma), depth + 1);
          }
        };
    visit(direct, direct, 0);
    for (int k = 1; k <= conversion_order; ++k) {
      out.push_back(make_check("nabla" + std::to_string(k) + "_rm_conversion", seed, residual[k], size[k]));
    }
  }
  return out;
}

IdentitySuiteReport check_identities(int seeds, int n, int N, int conversion_order) {
  if (seeds < 1) throw std::invalid_argument("at least one seed required");
  const Grid grid = Grid::make(n, N);
  IdentitySuiteReport report;
  report.n = n;
  report.N = N;
  report.seeds = seeds;
  report.conversion_order = conversion_order >= 0 ? conversion_order : (n == 1 ? 2 : 1);
  for (int s = 1; s <= seeds; ++s) {
    const IdentityState state = identity_state(grid, static_cast<std::uint64_t>(s));
    for (auto& c : check_state(state, report.conversion_order, static_cast<std::uint64_t>(s))) {
      report.checks.push_back(std::move(c));
    }
  }
  report.pass = std::all_of(report.checks.begin(), report.checks.end(), [](const auto& c) { return c.pass; });
  return report;
}

}  // namespace krf
