#include <doctest.h>

#include <cmath>

#include "krf/geometry.hpp"
#include "krf/spectral.hpp"
#include "test_support.hpp"

using namespace krf;
using krf::test::cosine;
using krf::test::max_diff;
using krf::test::pi;
using krf::test::scaled_potential;

namespace {

// d/d(axis) of `fn` at the sample points of `grid`, from centered differences
// on grids refined by 1, 2 and 4 with two Richardson extrapolation passes.
ScalarField fd_extrapolated(const Grid& grid, const std::function<cplx(std::span<const double>)>& fn,
                            int axis, int order) {
  const int N = grid.resolution();
  std::vector<ScalarField> levels;
  for (int r : {1, 2, 4}) {
    const Grid fine = Grid::make(grid.dim(), N * r);
    const ScalarField d = fd_oracle(ScalarField::from_function(fine, fn), axis, order);
    ScalarField coarse(grid);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      std::size_t q = 0;
      for (int a = 0; a < grid.axes(); ++a) q = q * (N * r) + static_cast<std::size_t>(grid.index(p, a) * r);
      coarse[p] = d[q];
    }
    levels.push_back(std::move(coarse));
  }
  ScalarField out(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const cplx r1 = (4.0 * levels[1][p] - levels[0][p]) / 3.0;
    const cplx r2 = (4.0 * levels[2][p] - levels[1][p]) / 3.0;
    out[p] = (16.0 * r2 - r1) / 15.0;
  }
  return out;
}

Reference reference_from(const ScalarField& phi0) { return make_reference(metric_from_potential(phi0)); }

struct Case {
  int n, N;
  std::uint64_t seed;
};

// Perturbations are kept small enough relative to N / K that products with
// the inverse metric stay resolved; the identities below rely on the
// discrete product rule.
MetricField random_metric(const Grid& grid, const MetricField& base, std::uint64_t seed) {
  const int K = grid.dim() == 1 ? 2 : 1;
  const double delta = grid.dim() == 1 ? 0.1 : 0.05;
  return metric_from_potential(scaled_potential(grid, K, delta, seed), base);
}

}  // namespace

TEST_CASE("Christoffel symbols") {
  const Grid g = Grid::make(1, 64);
  CHECK(max_abs(christoffel(MetricField::flat(g))) == 0.0);

  const double eps = 0.05;
  const Connection gamma = christoffel(metric_from_potential(cosine(g, 0, eps)));
  // Gamma = dz g / g with g = 1 - eps pi^2 cos(2 pi x)
  auto metric = [eps](std::span<const double> x) { return cplx(1.0 - eps * pi * pi * std::cos(2 * pi * x[0])); };
  const ScalarField g_values = ScalarField::from_function(g, metric);
  const ScalarField dgx = fd_extrapolated(g, metric, 0, 1);
  const ScalarField dgy = fd_extrapolated(g, metric, 1, 1);
  ScalarField oracle(g);
  for (std::size_t p = 0; p < g.size(); ++p) oracle[p] = 0.5 * (dgx[p] - cplx(0, 1) * dgy[p]) / g_values[p];
  CHECK(max_diff(gamma.at(0, 0, 0), oracle) < 1e-8);

  const auto analytic = ScalarField::from_function(g, [eps](auto x) {
    return eps * pi * pi * pi * std::sin(2 * pi * x[0]) / (1.0 - eps * pi * pi * std::cos(2 * pi * x[0]));
  });
  CHECK(max_diff(gamma.at(0, 0, 0), analytic) < 1e-10);

  const Grid g2 = Grid::make(2, 16);
  const Connection c2 = christoffel(random_metric(g2, MetricField::flat(g2), 3));
  double asym = 0.0;
  for (int k = 0; k < 2; ++k) asym = std::max(asym, max_diff(c2.at(k, 0, 1), c2.at(k, 1, 0)));
  CHECK(asym <= 1e-10 * max_abs(c2));
}

TEST_CASE("reference covariant derivative") {
  const Grid g = Grid::make(2, 16);
  const Reference flat = make_reference(MetricField::flat(g));
  const MetricField m = random_metric(g, flat.metric, 8);
  for (Slot s : {Slot::holo, Slot::anti}) {
    const TensorField d = covderiv_ref(m.components(), s, flat);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int a = 0; a < 2; ++a) {
          const ScalarField partial = s == Slot::holo ? dz(m.g(i, j), a) : dzbar(m.g(i, j), a);
          CHECK(max_diff(d.at({i, j, a}), partial) == 0.0);
        }
  }

  const Reference ref = reference_from(scaled_potential(g, 1, 0.1, 21));
  for (Slot s : {Slot::holo, Slot::anti}) {
    const TensorField d = covderiv_ref(ref.metric.components(), s, ref);
    CHECK(d.max_abs() <= 1e-9 * (1.0 + ref.metric.components().max_abs()));
  }
}

TEST_CASE("Ricci identity on a (1,0)-form") {
  // T_{i;k lbar} - T_{i;lbar k} = g0^{qbar p} R0_{i qbar k lbar} T_p
  const Grid g = Grid::make(2, 16);
  const Reference ref = reference_from(scaled_potential(g, 1, 0.05, 17));
  const auto forms = dz_all(random_bandlimited(g, 1, 0.3, 4));
  TensorField t(g, {Slot::holo});
  for (int i = 0; i < 2; ++i) t.at({i}) = forms[i];
  const TensorField kl = covderiv_ref(covderiv_ref(t, Slot::holo, ref), Slot::anti, ref);
  const TensorField lk = covderiv_ref(covderiv_ref(t, Slot::anti, ref), Slot::holo, ref);
  TensorField action(g, {Slot::holo, Slot::holo, Slot::anti});
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l)
        for (int q = 0; q < 2; ++q)
          for (int p = 0; p < 2; ++p)
            action.at({i, k, l}) += ref.metric.inv(q, p) * ref.curvature.at({i, q, k, l}) * t.at({p});
  const double scale = 1.0 + kl.max_abs();
  double residual = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l)
        residual = std::max(residual, max_diff(kl.at({i, k, l}) - lk.at({i, l, k}), action.at({i, k, l})));
  CHECK(action.max_abs() > 1e-3);
  CHECK(residual <= 1e-8 * scale);
}

TEST_CASE("curvature against a finite-difference oracle") {
  const Grid g = Grid::make(1, 64);
  CHECK(curvature_direct(MetricField::flat(g)).max_abs() == 0.0);

  const double eps = 0.02;
  auto metric = [eps](std::span<const double> x) { return cplx(1.0 - eps * pi * pi * std::cos(2 * pi * x[0])); };
  // R = -dz dzbar g + |dz g|^2 / g, with dz dzbar = Laplacian / 4
  const ScalarField gv = ScalarField::from_function(g, metric);
  const ScalarField gxx = fd_extrapolated(g, metric, 0, 2);
  const ScalarField gyy = fd_extrapolated(g, metric, 1, 2);
  const ScalarField gx = fd_extrapolated(g, metric, 0, 1);
  const ScalarField gy = fd_extrapolated(g, metric, 1, 1);
  ScalarField oracle(g);
  for (std::size_t p = 0; p < g.size(); ++p) {
    const cplx d = 0.5 * (gx[p] - cplx(0, 1) * gy[p]);
    oracle[p] = -0.25 * (gxx[p] + gyy[p]) + std::norm(d) / gv[p];
  }
  const TensorField rm = curvature_direct(metric_from_potential(cosine(g, 0, eps)));
  CHECK(max_diff(rm.at({0, 0, 0, 0}), oracle) <= 1e-8);
}

TEST_CASE("curvature two-path agreement and symmetries") {
  for (const Case c : {Case{1, 64, 1}, Case{1, 64, 2}, Case{2, 16, 3}}) {
    CAPTURE(c.n);
    const Grid g = Grid::make(c.n, c.N);
    const Reference flat = make_reference(MetricField::flat(g));
    const Reference curved = reference_from(c.n == 1 ? cosine(g, 1, 0.05) : scaled_potential(g, 1, 0.05, 9));
    for (const Reference* ref : {&flat, &curved}) {
      // u = 0 reproduces the reference curvature
      CHECK(max_diff(curvature_via_ref(ref->metric, *ref), ref->curvature) <=
            1e-9 * (1.0 + ref->curvature.max_abs()));
      const MetricField m = random_metric(g, ref->metric, c.seed + 40);
      const TensorField direct = curvature_direct(m);
      const double scale = 1.0 + direct.max_abs();
      CHECK(max_diff(curvature_via_ref(m, *ref), direct) <= 1e-8 * scale);
      CHECK(kahler_symmetry_residual(direct) <= 1e-9 * scale);
      CHECK(trace_identity_residual(m, *ref) <= 1e-8 * scale);
      CHECK(max_diff(ricci(m), ricci_trace(direct, m)) <= 1e-8 * scale);
    }
  }
}

TEST_CASE("Gauss-Bonnet and Laplacian divergence form") {
  const Grid g = Grid::make(1, 64);
  const MetricField m = metric_from_potential(scaled_potential(g, 5, 0.3, 12));
  const TensorField ric = ricci(m);
  // scalar curvature g^{-1} R_{1 1bar} times det g integrates to zero
  ScalarField density(g);
  for (std::size_t p = 0; p < g.size(); ++p) density[p] = m.inv(0, 0)[p] * ric.at({0, 0})[p] * m.det()[p];
  CHECK(std::abs(integrate(density)) <= 1e-10);

  CHECK(max_diff(laplacian(MetricField::flat(g), cosine(g, 0)), cosine(g, 0, -pi * pi)) < 1e-11);
  CHECK(laplacian(m, ScalarField(g, 5.0)).max_abs() == 0.0);
  const ScalarField h = random_bandlimited(g, 4, 1.0, 13);
  CHECK(std::abs(integrate(laplacian(m, h) * m.det())) <= 1e-10);

  const Grid g2 = Grid::make(2, 16);
  const MetricField m2 = metric_from_potential(scaled_potential(g2, 1, 0.3, 14));
  const ScalarField h2 = random_bandlimited(g2, 1, 1.0, 15);
  CHECK(std::abs(integrate(laplacian(m2, h2) * m2.det())) <= 1e-10);
}

TEST_CASE("tensor norms") {
  const Grid g = Grid::make(2, 16);
  const MetricField g0 = metric_from_potential(scaled_potential(g, 1, 0.2, 30));
  const MetricField m = metric_from_potential(scaled_potential(g, 1, 0.2, 31), g0);
  const ScalarField self = tensor_norm(m.components(), m);
  CHECK(max_diff(self, ScalarField(g, 2.0)) < 1e-12);
  CHECK(tensor_norm(TensorField(g, {Slot::holo, Slot::anti, Slot::holo}), m).max_abs() == 0.0);

  const TensorField t = covderiv_ref(m.components(), Slot::holo, make_reference(g0));
  TensorField t3 = t;
  t3 *= 3.0;
  const ScalarField base = tensor_norm(t, m);
  CHECK(max_diff(tensor_norm(t3, m), 9.0 * base) <= 1e-12 * (1.0 + 9.0 * base.max_abs()));
  CHECK(base.max_imag() <= 1e-12);
  CHECK(base.min_real() >= 0.0);

  // norm equivalence with exponent = rank
  const double ceq = pinch_eigenvalues(m, g0).c_eq;
  const ScalarField other = tensor_norm(t, g0);
  for (std::size_t p = 0; p < g.size(); ++p) {
    CHECK(base[p].real() <= std::pow(ceq, 3) * other[p].real() * (1 + 1e-12) + 1e-300);
    CHECK(base[p].real() >= std::pow(ceq, -3) * other[p].real() * (1 - 1e-12));
  }
}

TEST_CASE("evolving-metric derivatives of curvature") {
  for (const Case c : {Case{1, 64, 5}, Case{2, 16, 6}}) {
    CAPTURE(c.n);
    const Grid g = Grid::make(c.n, c.N);
    const Reference ref = reference_from(scaled_potential(g, c.n == 1 ? 2 : 1, 0.05, c.seed));
    const MetricField m = random_metric(g, ref.metric, c.seed + 1);

    CHECK(max_diff(nabla_rm_norm(m, ref, 0), tensor_norm(curvature_direct(m), m)) == 0.0);
    // rank-6 tensors at n = 2 are left to the identity suite
    for (int k = 1; k <= (c.n == 1 ? 2 : 1); ++k) {
      const auto a = nabla_rm(m, ref, k);
      const auto b = nabla_rm_direct(m, k);
      REQUIRE(a.size() == b.size());
      double scale = 1.0, residual = 0.0;
      ScalarField total(g);
      for (std::size_t i = 0; i < a.size(); ++i) {
        scale = std::max(scale, b[i].max_abs());
        residual = std::max(residual, max_diff(a[i], b[i]));
        total += tensor_norm(a[i], m);
      }
      CHECK(residual <= 1e-7 * scale);
      CHECK(max_diff(nabla_rm_norm(m, ref, k), total) <= 1e-10 * (1.0 + total.max_abs()));
    }
    CHECK_THROWS(nabla_rm(m, ref, 3));
  }
  const Grid g = Grid::make(1, 32);
  const Reference flat = make_reference(MetricField::flat(g));
  for (int k : {0, 1, 2}) CHECK(nabla_rm_norm(flat.metric, flat, k).max_abs() == 0.0);
}
