#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "krf/hermitian.hpp"
#include "krf/tensor.hpp"

namespace krf {

inline constexpr double kDefaultMargin = 0.05;

// Raised when a Hermitian (1,1)-field fails the admissibility margin: the
// potential has left the Kaehler cone.
class PositivityLoss : public std::runtime_error {
 public:
  PositivityLoss(std::size_t point, double eigenvalue, int stage = -1);

  std::size_t point() const { return point_; }
  double eigenvalue() const { return eigenvalue_; }
  int stage() const { return stage_; }
  PositivityLoss at_stage(int stage) const { return PositivityLoss(point_, eigenvalue_, stage); }

 private:
  std::size_t point_;
  double eigenvalue_;
  int stage_;
};

// Raised when metric components contain NaN or infinity.
class NonFiniteValues : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Hermitian positive-definite (1,1)-field g_{i jbar} with cached inverse
// g^{jbar i} and determinant.
class MetricField {
 public:
  MetricField() = default;

  // Checks finiteness, Hermitian symmetry and that the smallest eigenvalue of every
  // component matrix is at least `margin`; throws PositivityLoss otherwise.
  static MetricField assemble(TensorField components, double margin = kDefaultMargin);
  // Same caches, no positivity check.  Used for diagnostics at breakdown.
  static MetricField unchecked(TensorField components);
  static MetricField flat(const Grid& grid);

  const Grid& grid() const { return g_.grid(); }
  int dim() const { return g_.dim(); }
  const TensorField& components() const { return g_; }
  const ScalarField& g(int i, int j) const { return g_.at({i, j}); }
  // g^{jbar i}: g^{jbar i} g_{i kbar} = delta_{jk}.
  const ScalarField& inv(int j, int i) const { return inv_[j * dim() + i]; }
  const ScalarField& det() const { return det_; }

  Mat at(std::size_t point) const;
  Mat inverse_at(std::size_t point) const;  // entry (j, i) = g^{jbar i}

  MetricField scaled(double factor) const;
  // Smallest coordinate eigenvalue over the grid, and where it occurs.
  std::pair<double, std::size_t> min_eigenvalue() const;
  // Largest eigenvalue of the inverse matrix over the grid.
  double max_inverse_eigenvalue() const;
  double hermitian_residual() const;

 private:
  explicit MetricField(TensorField components);
  TensorField g_;
  std::vector<ScalarField> inv_;
  ScalarField det_;
};

// g = base + dz_i dzbar_j phi.  The one-argument form uses the flat base.
MetricField metric_from_potential(const ScalarField& phi, double margin = kDefaultMargin);
MetricField metric_from_potential(const ScalarField& phi, const MetricField& base,
                                  double margin = kDefaultMargin);
// Components only, without admissibility checking.
TensorField potential_components(const ScalarField& phi, const MetricField* base);

struct PinchReport {
  int n = 1;
  std::vector<double> eigenvalues;  // n per point, ascending
  double lambda_min = 0.0;          // global min of lambda_1
  double lambda_max = 0.0;          // global max of lambda_n
  double c_eq = 1.0;                // max(lambda_max, 1 / lambda_min)
};

// Generalized eigenvalues of g with respect to g0 at every point.
PinchReport pinch_eigenvalues(const MetricField& g, const MetricField& g0);

// Lower bound on lambda_1 from a trace bound and a determinant bound:
// sum lambda <= trace_bound, prod lambda >= det_bound imply
// lambda_1 >= det_bound * trace_bound^(1 - n).
double pinch_lower_bound(double trace_bound, double det_bound, int n);

}  // namespace krf
