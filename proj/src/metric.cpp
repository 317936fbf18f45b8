#include "krf/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "krf/spectral.hpp"

namespace krf {

// --- small Hermitian algebra -----------------------------------------------

Mat identity(int n) {
  Mat m;
  m.n = n;
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat multiply(const Mat& x, const Mat& y) {
  Mat m;
  m.n = x.n;
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) {
      std::complex<double> s = 0.0;
      for (int k = 0; k < x.n; ++k) s += x(i, k) * y(k, j);
      m(i, j) = s;
    }
  return m;
}

Mat adjoint(const Mat& x) {
  Mat m;
  m.n = x.n;
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) m(i, j) = std::conj(x(j, i));
  return m;
}

std::complex<double> determinant(const Mat& x) {
  return x.n == 1 ? x(0, 0) : x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0);
}

Mat inverse(const Mat& x) {
  Mat m;
  m.n = x.n;
  const auto det = determinant(x);
  if (x.n == 1) {
    m(0, 0) = 1.0 / det;
  } else {
    m(0, 0) = x(1, 1) / det;
    m(0, 1) = -x(0, 1) / det;
    m(1, 0) = -x(1, 0) / det;
    m(1, 1) = x(0, 0) / det;
  }
  return m;
}

HermitianEigen hermitian_eigen(const Mat& h) {
  HermitianEigen e;
  e.vectors = identity(h.n);
  if (h.n == 1) {
    e.values[0] = h(0, 0).real();
    return e;
  }
  const double a = h(0, 0).real();
  const double d = h(1, 1).real();
  const std::complex<double> b = 0.5 * (h(0, 1) + std::conj(h(1, 0)));
  const double mean = 0.5 * (a + d);
  const double half_gap = 0.5 * (a - d);
  const double r = std::sqrt(half_gap * half_gap + std::norm(b));
  e.values = {mean - r, mean + r};
  if (std::abs(b) == 0.0) {
    if (a > d) {
      e.vectors(0, 0) = 0.0;
      e.vectors(1, 0) = 1.0;
      e.vectors(0, 1) = 1.0;
      e.vectors(1, 1) = 0.0;
    }
    return e;
  }
  // Eigenvector of the larger eigenvalue from whichever row is better
  // conditioned, then its orthogonal complement.
  std::complex<double> v0, v1;
  if (half_gap >= 0.0) {
    v0 = half_gap + r;
    v1 = std::conj(b);
  } else {
    v0 = b;
    v1 = r - half_gap;
  }
  const double norm = std::sqrt(std::norm(v0) + std::norm(v1));
  v0 /= norm;
  v1 /= norm;
  e.vectors(0, 1) = v0;
  e.vectors(1, 1) = v1;
  e.vectors(0, 0) = -std::conj(v1);
  e.vectors(1, 0) = std::conj(v0);
  return e;
}

GeneralizedEigen generalized_eigen(const Mat& g, const Mat& g0) {
  GeneralizedEigen out;
  Mat linv;
  linv.n = g.n;
  if (g.n == 1) {
    linv(0, 0) = 1.0 / std::sqrt(g0(0, 0).real());
  } else {
    const double l11 = std::sqrt(g0(0, 0).real());
    const std::complex<double> l21 = g0(1, 0) / l11;
    const double l22 = std::sqrt(g0(1, 1).real() - std::norm(l21));
    linv(0, 0) = 1.0 / l11;
    linv(0, 1) = 0.0;
    linv(1, 0) = -l21 / (l11 * l22);
    linv(1, 1) = 1.0 / l22;
  }
  const Mat reduced = multiply(multiply(linv, g), adjoint(linv));
  const HermitianEigen e = hermitian_eigen(reduced);
  out.values = e.values;
  out.frame = multiply(adjoint(linv), e.vectors);
  return out;
}

// --- PositivityLoss ----------------------------------------------------------

namespace {
std::string positivity_message(std::size_t point, double eigenvalue, int stage) {
  std::ostringstream os;
  os << "positivity loss at point " << point << ": eigenvalue " << eigenvalue;
  if (stage >= 0) os << " (stage " << stage << ")";
  return os.str();
}
}  // namespace

PositivityLoss::PositivityLoss(std::size_t point, double eigenvalue, int stage)
    : std::runtime_error(positivity_message(point, eigenvalue, stage)),
      point_(point),
      eigenvalue_(eigenvalue),
      stage_(stage) {}

// --- MetricField -------------------------------------------------------------

MetricField::MetricField(TensorField components) : g_(std::move(components)) {
  const int n = g_.dim();
  const Grid& grid = g_.grid();
  inv_.assign(n * n, ScalarField(grid));
  det_ = ScalarField(grid);
  if (n == 1) {
    const ScalarField& a = g_.comp(0);
    ScalarField& ia = inv_[0];
    for (std::size_t p = 0; p < grid.size(); ++p) {
      det_[p] = a[p];
      ia[p] = std::conj(a[p]) / std::norm(a[p]);
    }
    return;
  }
  const ScalarField &a = g_.comp(0), &b = g_.comp(1), &c = g_.comp(2), &d = g_.comp(3);
  parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const cplx det = a[p] * d[p] - b[p] * c[p];
      const cplx r = std::conj(det) / std::norm(det);
      det_[p] = det;
      inv_[0][p] = d[p] * r;
      inv_[1][p] = -b[p] * r;
      inv_[2][p] = -c[p] * r;
      inv_[3][p] = a[p] * r;
    }
  });
}

Mat MetricField::at(std::size_t point) const {
  Mat m;
  m.n = dim();
  for (int c = 0; c < m.n * m.n; ++c) m.a[c] = g_.comp(c)[point];
  return m;
}

Mat MetricField::inverse_at(std::size_t point) const {
  Mat m;
  m.n = dim();
  for (int c = 0; c < m.n * m.n; ++c) m.a[c] = inv_[c][point];
  return m;
}

double MetricField::hermitian_residual() const {
  const int n = dim();
  double r = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto& a = g(i, j);
      const auto& b = g(j, i);
      for (std::size_t p = 0; p < a.size(); ++p) r = std::max(r, std::norm(a[p] - std::conj(b[p])));
    }
  return std::sqrt(r);
}

namespace {

// Smallest eigenvalue of the Hermitian part of the component matrix.
double smallest_eigenvalue(const TensorField& g, std::size_t p) {
  if (g.dim() == 1) return g.comp(0)[p].real();
  const double a = g.comp(0)[p].real(), d = g.comp(3)[p].real();
  const cplx b = 0.5 * (g.comp(1)[p] + std::conj(g.comp(2)[p]));
  const double half_gap = 0.5 * (a - d);
  return 0.5 * (a + d) - std::sqrt(half_gap * half_gap + std::norm(b));
}

}  // namespace

std::pair<double, std::size_t> MetricField::min_eigenvalue() const {
  double best = std::numeric_limits<double>::infinity();
  std::size_t where = 0;
  for (std::size_t p = 0; p < grid().size(); ++p) {
    const double lam = smallest_eigenvalue(g_, p);
    if (!(lam >= best)) {  // also catches NaN
      best = lam;
      where = p;
      if (std::isnan(lam)) break;
    }
  }
  return {best, where};
}

double MetricField::max_inverse_eigenvalue() const {
  double best = 0.0;
  for (std::size_t p = 0; p < grid().size(); ++p) {
    best = std::max(best, 1.0 / smallest_eigenvalue(g_, p));
  }
  return best;
}

MetricField MetricField::assemble(TensorField components, double margin) {
  if (components.signature() != std::vector<Slot>{Slot::holo, Slot::anti}) {
    throw std::invalid_argument("metric needs a (holo, anti) signature");
  }
  for (std::size_t c = 0; c < components.components(); ++c) {
    if (!components.comp(c).all_finite()) throw NonFiniteValues("metric has non-finite components");
  }
  MetricField m(std::move(components));
  const double scale = 1.0 + m.g_.max_abs();
  if (!(m.hermitian_residual() <= 1e-12 * scale)) {
    throw std::invalid_argument("metric components are not Hermitian");
  }
  const auto [lam, where] = m.min_eigenvalue();
  if (!(lam >= margin)) throw PositivityLoss(where, lam);
  return m;
}

MetricField MetricField::unchecked(TensorField components) { return MetricField(std::move(components)); }

MetricField MetricField::flat(const Grid& grid) {
  TensorField c(grid, {Slot::holo, Slot::anti});
  for (int i = 0; i < grid.dim(); ++i) c.at({i, i}) = ScalarField(grid, 1.0);
  return MetricField(std::move(c));
}

MetricField MetricField::scaled(double factor) const {
  TensorField c = g_;
  c *= factor;
  return MetricField(std::move(c));
}

TensorField potential_components(const ScalarField& phi, const MetricField* base) {
  const Grid& grid = phi.grid();
  const int n = grid.dim();
  auto hess = ddbar_all(phi);
  TensorField c(grid, {Slot::holo, Slot::anti});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ScalarField comp = std::move(hess[i * n + j]);
      if (base) {
        comp += base->g(i, j);
      } else if (i == j) {
        for (auto& v : comp.values()) v += 1.0;
      }
      c.at({i, j}) = std::move(comp);
    }
  return c;
}

MetricField metric_from_potential(const ScalarField& phi, double margin) {
  return MetricField::assemble(potential_components(phi, nullptr), margin);
}

MetricField metric_from_potential(const ScalarField& phi, const MetricField& base, double margin) {
  return MetricField::assemble(potential_components(phi, &base), margin);
}

// --- pinch -------------------------------------------------------------------

PinchReport pinch_eigenvalues(const MetricField& g, const MetricField& g0) {
  PinchReport r;
  const int n = g.dim();
  r.n = n;
  const std::size_t size = g.grid().size();
  r.eigenvalues.resize(size * n);
  parallel_for(size, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const auto e = generalized_eigen(g.at(p), g0.at(p));
      for (int k = 0; k < n; ++k) r.eigenvalues[p * n + k] = e.values[k];
    }
  });
  r.lambda_min = std::numeric_limits<double>::infinity();
  r.lambda_max = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < size; ++p) {
    r.lambda_min = std::min(r.lambda_min, r.eigenvalues[p * n]);
    r.lambda_max = std::max(r.lambda_max, r.eigenvalues[p * n + n - 1]);
  }
  r.c_eq = r.lambda_min > 0.0 ? std::max(r.lambda_max, 1.0 / r.lambda_min)
                              : std::numeric_limits<double>::infinity();
  return r;
}

double pinch_lower_bound(double trace_bound, double det_bound, int n) {
  return det_bound * std::pow(trace_bound, 1 - n);
}

}  // namespace krf
