#include "krf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "krf/spectral.hpp"

namespace krf {

Connection christoffel(const MetricField& g) {
  const Grid& grid = g.grid();
  const int n = g.dim();
  // dg[(j * n + l) * n + i] = dz_i g_{j lbar}
  std::vector<ScalarField> dg(n * n * n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      auto d = dz_all(g.g(j, l));
      for (int i = 0; i < n; ++i) dg[(j * n + l) * n + i] = std::move(d[i]);
    }
  Connection c{grid, std::vector<ScalarField>(n * n * n, ScalarField(grid))};
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        auto& out = c.coeff[(k * n + i) * n + j];
        for (int l = 0; l < n; ++l) {
          const auto& inv = g.inv(l, k);
          const auto& d = dg[(j * n + l) * n + i];
          for (std::size_t p = 0; p < grid.size(); ++p) out[p] += inv[p] * d[p];
        }
      }
  return c;
}

void subtract_connection_terms(TensorField& out, const TensorField& t, Slot direction,
                               const Connection& conn) {
  const int n = t.dim();
  const int rank = t.rank();
  const std::size_t size = t.grid().size();
  const bool holo = direction == Slot::holo;
  for (std::size_t c = 0; c < t.components(); ++c) {
    const std::vector<int> idx = t.multi_index(c);
    for (int a = 0; a < n; ++a) {
      ScalarField& target = out.comp(c * n + a);
      for (int s = 0; s < rank; ++s) {
        if (t.signature()[s] != direction) continue;
        std::vector<int> moved = idx;
        for (int b = 0; b < n; ++b) {
          moved[s] = b;
          const ScalarField& src = t.comp(t.flat_index(moved));
          const ScalarField& coeff = conn.at(b, a, idx[s]);
          if (holo) {
            for (std::size_t p = 0; p < size; ++p) target[p] -= coeff[p] * src[p];
          } else {
            for (std::size_t p = 0; p < size; ++p) target[p] -= std::conj(coeff[p]) * src[p];
          }
        }
      }
    }
  }
}

TensorField covderiv(const TensorField& t, Slot direction, const Connection* conn) {
  const int n = t.dim();
  std::vector<Slot> sig = t.signature();
  sig.push_back(direction);
  TensorField out(t.grid(), std::move(sig));
  for (std::size_t c = 0; c < t.components(); ++c) {
    auto d = direction == Slot::holo ? dz_all(t.comp(c)) : dzbar_all(t.comp(c));
    for (int a = 0; a < n; ++a) out.comp(c * n + a) = std::move(d[a]);
  }
  if (conn) subtract_connection_terms(out, t, direction, *conn);
  return out;
}

Reference make_reference(MetricField g0) {
  Reference ref;
  ref.gamma = christoffel(g0);
  ref.curvature = curvature_direct(g0);
  ref.metric = std::move(g0);
  return ref;
}

TensorField covderiv_ref(const TensorField& t, Slot direction, const Reference& ref) {
  return covderiv(t, direction, &ref.gamma);
}

TensorField curvature_direct(const MetricField& g) {
  const Grid& grid = g.grid();
  const int n = g.dim();
  const std::size_t size = grid.size();
  std::vector<std::vector<ScalarField>> hess(n * n), dh(n * n), da(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      hess[i * n + j] = ddbar_all(g.g(i, j));
      dh[i * n + j] = dz_all(g.g(i, j));
      da[i * n + j] = dzbar_all(g.g(i, j));
    }
  TensorField rm(grid, {Slot::holo, Slot::anti, Slot::holo, Slot::anti});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          ScalarField& out = rm.at({i, j, k, l});
          const ScalarField& h = hess[i * n + j][k * n + l];
          for (std::size_t p = 0; p < size; ++p) out[p] = -h[p];
          for (int mu = 0; mu < n; ++mu)
            for (int nu = 0; nu < n; ++nu) {
              const auto& inv = g.inv(nu, mu);
              const auto& a = dh[i * n + nu][k];
              const auto& b = da[mu * n + j][l];
              for (std::size_t p = 0; p < size; ++p) out[p] += inv[p] * a[p] * b[p];
            }
        }
  return rm;
}

namespace {

// Pointwise assembly of the quadratic and reference-curvature pieces shared
// by curvature_via_ref and the trace identity.
struct RefPieces {
  TensorField gk;   // g_{i jbar;k}
  TensorField gl;   // g_{i jbar;lbar}
  TensorField gkl;  // g_{i jbar;k lbar}
};

RefPieces ref_pieces(const MetricField& g, const Reference& ref) {
  RefPieces r;
  r.gk = covderiv_ref(g.components(), Slot::holo, ref);
  r.gl = covderiv_ref(g.components(), Slot::anti, ref);
  r.gkl = covderiv_ref(r.gk, Slot::anti, ref);
  return r;
}

// Q_{i jbar k lbar} = g^{qbar r} g_{i qbar;k} g_{r jbar;lbar}
//                   + R0_{i qbar k lbar} g0^{qbar r} g_{r jbar}
TensorField quadratic_plus_reference(const MetricField& g, const Reference& ref, const RefPieces& pc) {
  const int n = g.dim();
  const std::size_t size = g.grid().size();
  TensorField out(g.grid(), {Slot::holo, Slot::anti, Slot::holo, Slot::anti});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          ScalarField& dst = out.at({i, j, k, l});
          for (int q = 0; q < n; ++q)
            for (int r = 0; r < n; ++r) {
              const auto& inv = g.inv(q, r);
              const auto& a = pc.gk.at({i, q, k});
              const auto& b = pc.gl.at({r, j, l});
              const auto& r0 = ref.curvature.at({i, q, k, l});
              const auto& inv0 = ref.metric.inv(q, r);
              const auto& grj = g.g(r, j);
              for (std::size_t p = 0; p < size; ++p) {
                dst[p] += inv[p] * a[p] * b[p] + r0[p] * inv0[p] * grj[p];
              }
            }
        }
  return out;
}

}  // namespace

TensorField curvature_via_ref(const MetricField& g, const Reference& ref) {
  const RefPieces pc = ref_pieces(g, ref);
  TensorField rm = quadratic_plus_reference(g, ref, pc);
  rm -= pc.gkl;
  return rm;
}

double kahler_symmetry_residual(const TensorField& rm) {
  const int n = rm.dim();
  double r = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const auto& a = rm.at({i, j, k, l});
          const auto& b = rm.at({k, j, i, l});
          const auto& c = rm.at({i, l, k, j});
          const auto& d = rm.at({j, i, l, k});
          for (std::size_t p = 0; p < a.size(); ++p) {
            r = std::max({r, std::abs(a[p] - b[p]), std::abs(a[p] - c[p]),
                          std::abs(a[p] - std::conj(d[p]))});
          }
        }
  return r;
}

TensorField ricci(const MetricField& g) {
  const Grid& grid = g.grid();
  const int n = g.dim();
  ScalarField logdet(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) logdet[p] = std::log(g.det()[p].real());
  auto h = ddbar_all(logdet);
  TensorField ric(grid, {Slot::holo, Slot::anti});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ric.at({i, j}) = std::move(h[i * n + j]);
      ric.at({i, j}) *= -1.0;
    }
  return ric;
}

TensorField ricci_trace(const TensorField& rm, const MetricField& g) {
  const int n = g.dim();
  TensorField ric(g.grid(), {Slot::holo, Slot::anti});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          auto term = g.inv(l, k) * rm.at({i, j, k, l});
          ric.at({i, j}) += term;
        }
  return ric;
}

double trace_identity_residual(const MetricField& g, const Reference& ref) {
  const int n = g.dim();
  const std::size_t size = g.grid().size();
  const RefPieces pc = ref_pieces(g, ref);
  const TensorField rest = quadratic_plus_reference(g, ref, pc);
  const TensorField ric = ricci(g);
  double residual = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ScalarField lhs(g.grid());
      ScalarField rhs = ric.at({i, j});
      rhs *= -1.0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const auto& inv = g.inv(l, k);
          const auto& second = pc.gkl.at({i, j, k, l});
          const auto& other = rest.at({i, j, k, l});
          for (std::size_t p = 0; p < size; ++p) {
            lhs[p] += inv[p] * second[p];
            rhs[p] += inv[p] * other[p];
          }
        }
      for (std::size_t p = 0; p < size; ++p) residual = std::max(residual, std::abs(lhs[p] - rhs[p]));
    }
  return residual;
}

ScalarField laplacian(const MetricField& g, const ScalarField& h) {
  const int n = g.dim();
  const auto hess = ddbar_all(h);
  ScalarField out(g.grid());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto& inv = g.inv(j, i);
      const auto& d = hess[i * n + j];
      for (std::size_t p = 0; p < out.size(); ++p) out[p] += inv[p] * d[p];
    }
  return out;
}

ScalarField tensor_norm(const TensorField& t, const MetricField& weight) {
  const int n = t.dim();
  const int rank = t.rank();
  const std::size_t comps = t.components();
  ScalarField out(t.grid());
  parallel_for(t.grid().size(), [&](std::size_t begin, std::size_t end) {
    std::vector<cplx> u(comps), v(comps);
    for (std::size_t p = begin; p < end; ++p) {
      for (std::size_t c = 0; c < comps; ++c) u[c] = t.comp(c)[p];
      const Mat w = weight.inverse_at(p);  // w(j, i) = g^{jbar i}
      std::size_t stride = comps;
      for (int s = 0; s < rank; ++s) {
        stride /= static_cast<std::size_t>(n);
        const bool holo = t.signature()[s] == Slot::holo;
        std::fill(v.begin(), v.end(), cplx(0.0));
        for (std::size_t c = 0; c < comps; ++c) {
          const int a = static_cast<int>((c / stride) % static_cast<std::size_t>(n));
          const std::size_t base = c - static_cast<std::size_t>(a) * stride;
          for (int b = 0; b < n; ++b) {
            // holomorphic slot a pairs with conj slot b through g^{bbar a};
            // anti-holomorphic slot abar pairs through g^{abar b}.
            const cplx f = holo ? w(b, a) : w(a, b);
            v[base + static_cast<std::size_t>(b) * stride] += f * u[c];
          }
        }
        std::swap(u, v);
      }
      cplx sum = 0.0;
      for (std::size_t c = 0; c < comps; ++c) sum += std::conj(t.comp(c)[p]) * u[c];
      out[p] = sum;
    }
  });
  return out;
}

Connection difference_tensor(const MetricField& g, const Reference& ref) {
  const Grid& grid = g.grid();
  const int n = g.dim();
  const TensorField gk = covderiv_ref(g.components(), Slot::holo, ref);
  Connection d{grid, std::vector<ScalarField>(n * n * n, ScalarField(grid))};
  for (int a = 0; a < n; ++a)
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i) {
        auto& out = d.coeff[(a * n + l) * n + i];
        for (int b = 0; b < n; ++b) {
          const auto& inv = g.inv(b, a);
          const auto& src = gk.at({i, b, l});
          for (std::size_t p = 0; p < grid.size(); ++p) out[p] += inv[p] * src[p];
        }
      }
  return d;
}

TensorField covderiv_evolving(const TensorField& t, Slot direction, const Reference& ref,
                              const Connection& difference) {
  TensorField out = covderiv_ref(t, direction, ref);
  subtract_connection_terms(out, t, direction, difference);
  return out;
}

std::vector<std::vector<Slot>> direction_patterns(int m) {
  std::vector<std::vector<Slot>> patterns{{}};
  for (int level = 0; level < m; ++level) {
    std::vector<std::vector<Slot>> next;
    for (const auto& p : patterns) {
      for (Slot s : {Slot::holo, Slot::anti}) {
        auto q = p;
        q.push_back(s);
        next.push_back(std::move(q));
      }
    }
    patterns = std::move(next);
  }
  return patterns;
}

namespace {

void check_order(int k) {
  if (k < 0 || k > 2) throw std::invalid_argument("curvature derivative order must be 0, 1 or 2");
}

}  // namespace

std::vector<TensorField> nabla_rm(const MetricField& g, const Reference& ref, int k) {
  check_order(k);
  const Connection diff = difference_tensor(g, ref);
  std::vector<TensorField> level{curvature_direct(g)};
  for (int step = 0; step < k; ++step) {
    std::vector<TensorField> next;
    for (const auto& t : level) {
      for (Slot s : {Slot::holo, Slot::anti}) next.push_back(covderiv_evolving(t, s, ref, diff));
    }
    level = std::move(next);
  }
  return level;
}

std::vector<TensorField> nabla_rm_direct(const MetricField& g, int k) {
  check_order(k);
  const Connection gamma = christoffel(g);
  std::vector<TensorField> level{curvature_direct(g)};
  for (int step = 0; step < k; ++step) {
    std::vector<TensorField> next;
    for (const auto& t : level) {
      for (Slot s : {Slot::holo, Slot::anti}) next.push_back(covderiv(t, s, &gamma));
    }
    level = std::move(next);
  }
  return level;
}

ScalarField nabla_rm_norm(const MetricField& g, const Reference& ref, int k) {
  check_order(k);
  const TensorField rm = curvature_direct(g);
  if (k == 0) return tensor_norm(rm, g);
  const Connection diff = difference_tensor(g, ref);
  ScalarField total(g.grid());
  std::function<void(const TensorField&, int)> visit = [&](const TensorField& t, int depth) {
    if (depth == k) {
      total += tensor_norm(t, g);
      return;
    }
    for (Slot s : {Slot::holo, Slot::anti}) visit(covderiv_evolving(t, s, ref, diff), depth + 1);
  };
  visit(rm, 0);
  return total;
}

}  // namespace krf
