#include "krf/fits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace krf {

ShiFit shi_fit(const std::vector<double>& t, const std::vector<double>& values, int k, double t_split) {
  if (t.size() != values.size()) throw std::invalid_argument("series length mismatch");
  if (t.empty()) throw EmptySeries("shi_fit needs at least one sample");
  if (k < 0) throw std::invalid_argument("derivative order must be nonnegative");
  ShiFit fit;
  fit.k = k;
  fit.t_split = t_split;
  fit.samples = t.size();
  if (k == 0) {
    fit.A = std::max(0.0, *std::max_element(values.begin(), values.end()));
  } else {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] >= t_split) fit.A = std::max(fit.A, values[i]);
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] > 0.0 && t[i] < t_split) fit.B = std::max(fit.B, (values[i] - fit.A) * std::pow(t[i], k));
    }
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (k > 0 && t[i] <= 0.0) continue;
    const double bound = fit.A + (k > 0 ? fit.B / std::pow(t[i], k) : 0.0);
    if (values[i] > bound + 1e-12 * (1.0 + std::abs(values[i]))) ++fit.violations;
  }
  return fit;
}

LinearEnvelope fit_linear_envelope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("series length mismatch");
  if (x.empty()) throw EmptySeries("envelope fit needs at least one sample");
  const double xbar = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());

  // upper convex hull of the points, x ascending
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] > y[b];
  });
  std::vector<std::size_t> hull;
  for (std::size_t i : order) {
    if (!hull.empty() && x[hull.back()] == x[i]) continue;
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], b = hull.back();
      const double cross = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a]);
      if (cross >= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(i);
  }

  auto violation = [&](double slope, double intercept) {
    double v = -std::numeric_limits<double>::infinity();
    for (std::size_t i : hull) v = std::max(v, y[i] - (slope * x[i] + intercept));
    return v;
  };

  // candidates: the horizontal line through the top, every hull edge with
  // nonnegative slope and intercept, and the steepest line through the origin
  const double ymax = std::max(0.0, *std::max_element(y.begin(), y.end()));
  std::vector<std::pair<double, double>> candidates{{0.0, ymax}};
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const std::size_t a = hull[h], b = hull[h + 1];
    const double slope = (y[b] - y[a]) / (x[b] - x[a]);
    const double intercept = y[a] - slope * x[a];
    if (slope >= 0.0 && intercept >= 0.0) candidates.emplace_back(slope, intercept);
  }
  double through_origin = 0.0;
  bool origin_ok = true;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) through_origin = std::max(through_origin, y[i] / x[i]);
    else if (y[i] > 0.0) origin_ok = false;
  }
  if (origin_ok) candidates.emplace_back(through_origin, 0.0);

  LinearEnvelope best;
  double best_value = std::numeric_limits<double>::infinity();
  for (const auto& [slope, intercept] : candidates) {
    const double v = violation(slope, intercept);
    const double tol = 1e-12 * (1.0 + ymax);
    if (v > tol) continue;
    const double value = slope * xbar + intercept;
    if (value < best_value) {
      best_value = value;
      best.slope = slope;
      best.intercept = intercept;
      best.max_violation = v;
    }
  }
  return best;
}

}  // namespace krf
