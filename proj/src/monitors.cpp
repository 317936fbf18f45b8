#include "krf/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "krf/spectral.hpp"

namespace krf {

namespace {

double max_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) m = std::max(m, std::abs(a[p] - b[p]));
  return m;
}

double max_diff(const TensorField& a, const TensorField& b) {
  double m = 0.0;
  for (std::size_t c = 0; c < a.components(); ++c) m = std::max(m, max_diff(a.comp(c), b.comp(c)));
  return m;
}

TensorField hessian_tensor(const ScalarField& h) {
  const Grid& grid = h.grid();
  const int n = grid.dim();
  auto d = ddbar_all(h);
  TensorField out(grid, {Slot::holo, Slot::anti});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.at({i, j}) = std::move(d[i * n + j]);
  return out;
}

// Depth-first sums of |nabla^m T|^2 for m = 1..depth, each derivative taken
// by `derive` and normed against `weight`.
std::vector<ScalarField> derivative_norms(const TensorField& t, int depth, const MetricField& weight,
                                          const std::function<TensorField(const TensorField&, Slot)>& derive) {
  std::vector<ScalarField> sums(depth, ScalarField(t.grid()));
  std::function<void(const TensorField&, int)> visit = [&](const TensorField& x, int level) {
    if (level == depth) return;
    for (Slot s : {Slot::holo, Slot::anti}) {
      TensorField d = derive(x, s);
      sums[level] += tensor_norm(d, weight);
      visit(d, level + 1);
    }
  };
  visit(t, 0);
  return sums;
}

// g0^{jbar i} g^{lbar k} g^{qbar p} g_{i qbar;k} g_{p jbar;lbar}
ScalarField quadratic_s(const MetricField& g, const Reference& ref, const TensorField& gk, const TensorField& gl) {
  const int n = g.dim();
  const std::size_t size = g.grid().size();
  ScalarField out(g.grid());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (int q = 0; q < n; ++q)
            for (int p = 0; p < n; ++p) {
              const auto& a = ref.metric.inv(j, i);
              const auto& b = g.inv(l, k);
              const auto& c = g.inv(q, p);
              const auto& x = gk.at({i, q, k});
              const auto& y = gl.at({p, j, l});
              for (std::size_t s = 0; s < size; ++s) out[s] += a[s] * b[s] * c[s] * x[s] * y[s];
            }
  return out;
}

// g0^{jbar i} R0_{i qbar k lbar} g0^{qbar p} g_{p jbar} g^{lbar k}
ScalarField reference_s(const MetricField& g, const Reference& ref) {
  const int n = g.dim();
  const std::size_t size = g.grid().size();
  ScalarField out(g.grid());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (int q = 0; q < n; ++q)
            for (int p = 0; p < n; ++p) {
              const auto& a = ref.metric.inv(j, i);
              const auto& r = ref.curvature.at({i, q, k, l});
              const auto& b = ref.metric.inv(q, p);
              const auto& m = g.g(p, j);
              const auto& c = g.inv(l, k);
              for (std::size_t s = 0; s < size; ++s) out[s] += a[s] * r[s] * b[s] * m[s] * c[s];
            }
  return out;
}

std::vector<double> real_values(const ScalarField& f) {
  std::vector<double> out(f.size());
  for (std::size_t p = 0; p < f.size(); ++p) out[p] = f[p].real();
  return out;
}

// Applies the frame change slot by slot: holomorphic slots pick up conj(M),
// anti-holomorphic slots M.
void to_frame(std::vector<cplx>& u, std::vector<cplx>& scratch, const std::vector<Slot>& sig, const Mat& m) {
  const int n = m.n;
  std::size_t stride = u.size();
  for (Slot slot : sig) {
    stride /= static_cast<std::size_t>(n);
    std::fill(scratch.begin(), scratch.end(), cplx(0.0));
    for (std::size_t c = 0; c < u.size(); ++c) {
      const int i = static_cast<int>((c / stride) % static_cast<std::size_t>(n));
      const std::size_t base = c - static_cast<std::size_t>(i) * stride;
      for (int a = 0; a < n; ++a) {
        const cplx f = slot == Slot::holo ? std::conj(m(i, a)) : m(i, a);
        scratch[base + static_cast<std::size_t>(a) * stride] += f * u[c];
      }
    }
    std::swap(u, scratch);
  }
}

void gather(const TensorField& t, std::size_t p, std::vector<cplx>& out) {
  for (std::size_t c = 0; c < t.components(); ++c) out[c] = t.comp(c)[p];
}

}  // namespace

Extrema real_extrema(const ScalarField& f) { return {f.min_real(), f.max_real()}; }

ScalarField monitor_S(const MetricField& g, const MetricField& g0) {
  const int n = g.dim();
  ScalarField s(g.grid());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto& a = g0.inv(j, i);
      const auto& b = g.g(i, j);
      for (std::size_t p = 0; p < s.size(); ++p) s[p] += a[p] * b[p];
    }
  return s;
}

ScalarField monitor_Q(const MetricField& g, const Reference& ref) {
  return tensor_norm(covderiv_ref(g.components(), Slot::holo, ref), g);
}

ScalarField monitor_Qm(const MetricField& g, const Reference& ref, int m) {
  if (m < 1) throw std::invalid_argument("Q_m needs m >= 1");
  auto derive = [&](const TensorField& t, Slot s) { return covderiv_ref(t, s, ref); };
  return derivative_norms(g.components(), m, ref.metric, derive).back();
}

MonitorRecord make_record(const FlowState& state, const FlowContext& ctx) {
  const MetricField& g = state.g;
  const Reference& ref = ctx.ref;
  const int n = g.dim();
  MonitorRecord r;
  r.t = state.t;
  r.step = state.step;
  const Extrema s = real_extrema(monitor_S(g, ref.metric));
  r.s_min = s.min;
  r.s_max = s.max;
  r.q_sup = monitor_Q(g, ref).max_real();

  auto ref_derive = [&](const TensorField& t, Slot slot) { return covderiv_ref(t, slot, ref); };
  if (ctx.config.m_max > 0) {
    for (const auto& f : derivative_norms(g.components(), ctx.config.m_max, ref.metric, ref_derive)) {
      r.qm_sup.push_back(f.max_real());
    }
  }

  const TensorField rm = curvature_direct(g);
  r.rm_sup.push_back(tensor_norm(rm, g).max_real());
  if (ctx.config.k_max > 0) {
    const Connection diff = difference_tensor(g, ref);
    auto evolving = [&](const TensorField& t, Slot slot) { return covderiv_evolving(t, slot, ref, diff); };
    for (const auto& f : derivative_norms(rm, ctx.config.k_max, g, evolving)) r.rm_sup.push_back(f.max_real());
  }

  const PinchReport pinch = pinch_eigenvalues(g, ref.metric);
  r.lam_min = pinch.lambda_min;
  r.lam_max = pinch.lambda_max;
  r.c_eq = pinch.c_eq;
  r.volume = integrate(g.det()).real();
  r.w_sup = state.w.max_abs();

  const TensorField ric = ricci(g);
  r.ric_sup = ric.max_abs();
  ScalarField density(g.grid());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto& a = g.inv(j, i);
      const auto& b = ric.at({i, j});
      for (std::size_t p = 0; p < density.size(); ++p) density[p] += a[p] * b[p] * g.det()[p];
    }
  r.gauss_bonnet = integrate(density).real();
  return r;
}

ResidualReport make_report(std::string identity, double residual, double scale, double bound,
                           std::vector<double> times) {
  ResidualReport r;
  r.identity = std::move(identity);
  r.residual = residual;
  r.scale = scale > 0.0 ? scale : 1.0;
  r.tolerance = bound / r.scale;
  r.pass = residual <= bound;
  r.times = std::move(times);
  return r;
}

std::vector<ResidualReport> evolution_residuals(const Window& w, const FlowContext& ctx) {
  const double dt = 0.5 * (w.next.t - w.prev.t);
  const double c = ctx.config.c;
  const MetricField& g = w.mid.g;
  const Reference& ref = ctx.ref;
  const int n = g.dim();
  const Grid& grid = g.grid();
  const std::vector<double> times{w.mid.t};
  const double h = 4.0 * dt * dt;
  std::vector<ResidualReport> out;

  // d_t^3 g = dz dzbar w_tt with w_t = Lap w + c w and
  // w_tt = Lap w_t + c w_t - g^{jbar k} w_{k lbar} g^{lbar i} w_{i jbar}
  const ScalarField lap1 = laplacian(g, w.mid.w);
  ScalarField w_t = w.mid.w;
  w_t *= c;
  w_t += lap1;
  ScalarField w_tt = laplacian(g, w_t);
  w_tt.axpy(c, w_t);
  {
    const TensorField hw = hessian_tensor(w.mid.w);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            const auto& a = g.inv(j, k);
            const auto& b = hw.at({k, l});
            const auto& d = g.inv(l, i);
            const auto& e = hw.at({i, j});
            for (std::size_t p = 0; p < grid.size(); ++p) w_tt[p] -= a[p] * b[p] * d[p] * e[p];
          }
  }
  const TensorField third = hessian_tensor(w_tt);

  // u moves by the dealiased right side, so each identity carries the part
  // of the unprojected one above the cutoff as an exactly computed floor.
  ScalarField tail(grid);
  if (ctx.config.dealias) {
    for (std::size_t p = 0; p < grid.size(); ++p) {
      tail[p] = std::log(g.det()[p].real()) - ctx.log_det_ref[p] + c * w.mid.u[p] + ctx.f[p] - w.mid.w[p];
    }
  }
  const TensorField tail_h = hessian_tensor(tail);

  const TensorField ric = ricci(g);
  {
    TensorField lhs = w.next.g.components() - w.prev.g.components();
    lhs *= 1.0 / (2.0 * dt);
    TensorField rhs = g.components();
    rhs *= c;
    rhs -= ric;
    out.push_back(make_report("flow_equation", max_diff(lhs, rhs), ric.max_abs(), h * third.max_abs() + tail_h.max_abs() + 1e-8, times));
  }

  const TensorField gk = covderiv_ref(g.components(), Slot::holo, ref);
  {
    const TensorField gl = covderiv_ref(g.components(), Slot::anti, ref);
    const ScalarField s_prev = monitor_S(w.prev.g, ref.metric);
    const ScalarField s_mid = monitor_S(g, ref.metric);
    const ScalarField s_next = monitor_S(w.next.g, ref.metric);
    const ScalarField lap_s = laplacian(g, s_mid);
    const ScalarField quad = quadratic_s(g, ref, gk, gl);
    const ScalarField curv = reference_s(g, ref);
    ScalarField lhs(grid), rhs(grid);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      lhs[p] = (s_next[p] - s_prev[p]) / (2.0 * dt) - lap_s[p];
      rhs[p] = c * s_mid[p] - quad[p] - curv[p];
    }
    ScalarField s3(grid), s_tail(grid);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        s3 += ref.metric.inv(j, i) * third.at({i, j});
        s_tail += ref.metric.inv(j, i) * tail_h.at({i, j});
      }
    const double scale = std::max({quad.max_abs(), curv.max_abs(), lap_s.max_abs()});
    out.push_back(make_report("s_evolution", max_diff(lhs, rhs), scale,
                              h * s3.max_abs() + s_tail.max_abs() + 1e-6 * (1.0 + scale), times));
  }

  {
    TensorField lhs = covderiv_ref(w.next.g.components(), Slot::holo, ref) -
                      covderiv_ref(w.prev.g.components(), Slot::holo, ref);
    lhs *= 1.0 / (2.0 * dt);
    const Connection gamma = christoffel(g);
    const TensorField nabla_ric = covderiv(ric, Slot::holo, &gamma);
    TensorField rhs = gk;
    rhs *= c;
    rhs -= nabla_ric;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          ScalarField& dst = rhs.at({i, j, k});
          for (int a = 0; a < n; ++a)
            for (int d = 0; d < n; ++d) {
              const auto& inv = g.inv(d, a);
              const auto& r = ric.at({a, j});
              const auto& x = gk.at({i, d, k});
              for (std::size_t p = 0; p < grid.size(); ++p) dst[p] -= inv[p] * r[p] * x[p];
            }
        }
    const double s3 = covderiv_ref(third, Slot::holo, ref).max_abs();
    const double scale = nabla_ric.max_abs();
    const double floor = covderiv_ref(tail_h, Slot::holo, ref).max_abs();
    out.push_back(
        make_report("gk_evolution", max_diff(lhs, rhs), scale, h * s3 + floor + 1e-6 * (1.0 + scale), times));
  }

  {
    ScalarField lhs(grid), rhs(grid);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      lhs[p] = (w.next.w[p] - w.prev.w[p]) / (2.0 * dt);
      rhs[p] = lap1[p] + c * w.mid.w[p];
    }
    const double s3 = laplacian(g, w_tt).max_abs();
    const double floor = ctx.config.dealias ? max_diff(rhs, dealias(rhs)) : 0.0;
    out.push_back(
        make_report("w_evolution", max_diff(lhs, rhs), w.mid.w.max_abs(), std::max(1e-6, h * s3) + floor, times));
  }
  return out;
}

QDecomposition q_evolution_decomposition(const Window& w, const FlowContext& ctx) {
  const double dt = 0.5 * (w.next.t - w.prev.t);
  const MetricField& g = w.mid.g;
  const Reference& ref = ctx.ref;
  const int n = g.dim();
  const Grid& grid = g.grid();
  const std::size_t size = grid.size();

  const ScalarField q_prev = monitor_Q(w.prev.g, ref);
  const ScalarField q_mid = monitor_Q(g, ref);
  const ScalarField q_next = monitor_Q(w.next.g, ref);
  const ScalarField lap_q = laplacian(g, q_mid);
  const ScalarField s_prev = monitor_S(w.prev.g, ref.metric);
  const ScalarField s_mid = monitor_S(g, ref.metric);
  const ScalarField s_next = monitor_S(w.next.g, ref.metric);
  const ScalarField lap_s = laplacian(g, s_mid);

  const TensorField gk = covderiv_ref(g.components(), Slot::holo, ref);
  const TensorField gl = covderiv_ref(g.components(), Slot::anti, ref);
  const TensorField gkl = covderiv_ref(gk, Slot::anti, ref);
  const TensorField gkm = covderiv_ref(gk, Slot::holo, ref);
  const ScalarField quad = quadratic_s(g, ref, gk, gl);

  QDecomposition d;
  d.t = w.mid.t;
  d.q = real_values(q_mid);
  d.s = real_values(s_mid);
  d.quad_s = real_values(quad);
  d.heat_q.resize(size);
  d.heat_s.resize(size);
  d.square1.assign(size, 0.0);
  d.square2.assign(size, 0.0);
  d.remainder.resize(size);
  d.valid.assign(size, true);
  for (std::size_t p = 0; p < size; ++p) {
    d.heat_q[p] = ((q_next[p] - q_prev[p]) / (2.0 * dt) - lap_q[p]).real();
    d.heat_s[p] = ((s_next[p] - s_prev[p]) / (2.0 * dt) - lap_s[p]).real();
  }

  const std::size_t c3 = gk.components(), c4 = gkl.components();
  std::vector<char> ok(size, 1);
  parallel_for(size, [&](std::size_t begin, std::size_t end) {
    std::vector<cplx> a(c3), b(c3), kl(c4), km(c4), scratch3(c3), scratch4(c4);
    for (std::size_t p = begin; p < end; ++p) {
      const Mat G = g.at(p), G0 = ref.metric.at(p);
      const GeneralizedEigen e = generalized_eigen(G, G0);
      const Mat m0 = multiply(multiply(adjoint(e.frame), G0), e.frame);
      const Mat m1 = multiply(multiply(adjoint(e.frame), G), e.frame);
      double err = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          err = std::max(err, std::abs(m0(i, j) - (i == j ? 1.0 : 0.0)));
          err = std::max(err, std::abs(m1(i, j) - (i == j ? e.values[i] : 0.0)) / (1.0 + e.values[n - 1]));
        }
      if (!(err <= 1e-10) || !(e.values[0] > 0.0)) {
        ok[p] = 0;
        continue;
      }
      gather(gk, p, a);
      gather(gl, p, b);
      gather(gkl, p, kl);
      gather(gkm, p, km);
      to_frame(a, scratch3, gk.signature(), e.frame);
      to_frame(b, scratch3, gl.signature(), e.frame);
      to_frame(kl, scratch4, gkl.signature(), e.frame);
      to_frame(km, scratch4, gkm.signature(), e.frame);
      auto at3 = [n](const std::vector<cplx>& t, int i, int j, int k) { return t[(i * n + j) * n + k]; };
      auto at4 = [n](const std::vector<cplx>& t, int i, int j, int k, int l) {
        return t[((i * n + j) * n + k) * n + l];
      };
      const auto& lam = e.values;
      double s1 = 0.0, s2 = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
              // g_{i kbar;j lbar} - sum_c g_{i cbar;j} g_{c kbar;lbar} / lambda_c
              cplx x = at4(kl, i, k, j, l);
              for (int c = 0; c < n; ++c) x -= at3(a, i, c, j) * at3(b, c, k, l) / lam[c];
              s1 += std::norm(x) / (lam[i] * lam[j] * lam[k] * lam[l]);
              // g_{i qbar;k mu} with (q, k, mu) = (j, k, l)
              cplx y = at4(km, i, j, k, l);
              for (int al = 0; al < n; ++al) {
                y -= (at3(a, al, j, i) * at3(a, k, al, l) + at3(a, al, j, l) * at3(a, i, al, k)) / lam[al];
              }
              s2 += std::norm(y) / (lam[i] * lam[k] * lam[j] * lam[l]);
            }
      d.square1[p] = s1;
      d.square2[p] = s2;
    }
  });
  for (std::size_t p = 0; p < size; ++p) {
    d.valid[p] = ok[p] != 0;
    if (!d.valid[p]) ++d.excluded;
    d.remainder[p] = d.heat_q[p] + d.square1[p] + d.square2[p];
  }
  if (d.excluded * 100 > size) {
    throw DiagonalizationFailure("normal frame failed at " + std::to_string(d.excluded) + " of " +
                                 std::to_string(size) + " points");
  }
  return d;
}

std::pair<ScalarField, ScalarField> q_squares_tensorial(const MetricField& g, const Reference& ref) {
  const int n = g.dim();
  const std::size_t size = g.grid().size();
  const TensorField gk = covderiv_ref(g.components(), Slot::holo, ref);
  const TensorField gl = covderiv_ref(g.components(), Slot::anti, ref);
  TensorField a = covderiv_ref(gk, Slot::anti, ref);  // (i, kbar, j, lbar)
  TensorField b = covderiv_ref(gk, Slot::holo, ref);  // (i, qbar, k, mu)
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          ScalarField& x = a.at({i, k, j, l});
          ScalarField& y = b.at({i, k, j, l});
          for (int cc = 0; cc < n; ++cc)
            for (int dd = 0; dd < n; ++dd) {
              const auto& inv = g.inv(cc, dd);
              const auto& p1 = gk.at({i, cc, j});
              const auto& p2 = gl.at({dd, k, l});
              // second square with (q, k, mu) = (k, j, l)
              const auto& y1 = gk.at({dd, k, i});
              const auto& y2 = gk.at({j, cc, l});
              const auto& y3 = gk.at({dd, k, l});
              const auto& y4 = gk.at({i, cc, j});
              for (std::size_t p = 0; p < size; ++p) {
                x[p] -= inv[p] * p1[p] * p2[p];
                y[p] -= inv[p] * (y1[p] * y2[p] + y3[p] * y4[p]);
              }
            }
        }
  return {tensor_norm(a, g), tensor_norm(b, g)};
}

MaxPrincipleReport max_principle_check(const ScalarField& h, const MetricField& g) {
  const Grid& grid = g.grid();
  const int n = grid.dim();
  const double cell = std::sqrt(2.0 * n) / (2.0 * grid.resolution());

  // real partial derivatives: d/dx = dz + dzbar, d/dy = i (dz - dzbar)
  auto real_gradient = [n](const ScalarField& f) {
    const auto a = dz_all(f);
    const auto b = dzbar_all(f);
    std::vector<ScalarField> out;
    for (int j = 0; j < n; ++j) {
      out.push_back(a[j] + b[j]);
      out.push_back(cplx(0, 1) * (a[j] - b[j]));
    }
    return out;
  };
  auto euclid_sup = [](const std::vector<ScalarField>& fs) {
    double m = 0.0;
    for (std::size_t p = 0; p < fs.front().size(); ++p) {
      double s = 0.0;
      for (const auto& f : fs) s += std::norm(f[p]);
      m = std::max(m, std::sqrt(s));
    }
    return m;
  };

  MaxPrincipleReport r;
  r.point = h.argmax_real();
  r.value = h[r.point].real();

  const auto dh = dz_all(h);
  cplx norm2 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) norm2 += g.inv(j, i)[r.point] * dh[i][r.point] * std::conj(dh[j][r.point]);
  r.gradient = std::sqrt(std::max(0.0, norm2.real()));

  std::vector<ScalarField> hess;
  for (const auto& d : real_gradient(h))
    for (auto& e : real_gradient(d)) hess.push_back(std::move(e));
  const double lambda = g.max_inverse_eigenvalue();
  double grad_sup = 0.0;
  for (const auto& d : dh) grad_sup = std::max(grad_sup, d.max_abs());
  r.gradient_tolerance = 0.5 * std::sqrt(lambda) * euclid_sup(hess) * cell * (1.0 + 1e-9) + 1e-10 * (1.0 + grad_sup);

  const ScalarField lap = laplacian(g, h);
  r.laplacian = lap[r.point].real();
  r.laplacian_tolerance = euclid_sup(real_gradient(lap)) * cell * (1.0 + 1e-9) + 1e-10 * (1.0 + lap.max_abs());
  r.pass = r.gradient <= r.gradient_tolerance && r.laplacian <= r.laplacian_tolerance;
  return r;
}

}  // namespace krf
