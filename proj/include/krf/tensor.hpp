#pragma once

#include <vector>

#include "krf/grid.hpp"

namespace krf {

enum class Slot { holo, anti };

// Fully covariant tensor field.  Each slot is a holomorphic or
// anti-holomorphic lower index ranging over 0..n-1; component multi-indices
// are flattened row-major in slot order.
class TensorField {
 public:
  TensorField() = default;
  TensorField(const Grid& grid, std::vector<Slot> signature);

  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  int rank() const { return static_cast<int>(signature_.size()); }
  const std::vector<Slot>& signature() const { return signature_; }
  std::size_t components() const { return comps_.size(); }

  ScalarField& comp(std::size_t flat) { return comps_[flat]; }
  const ScalarField& comp(std::size_t flat) const { return comps_[flat]; }
  ScalarField& at(std::initializer_list<int> idx) { return comps_[flat_index(idx)]; }
  const ScalarField& at(std::initializer_list<int> idx) const { return comps_[flat_index(idx)]; }

  std::size_t flat_index(std::initializer_list<int> idx) const;
  std::size_t flat_index(const std::vector<int>& idx) const;
  std::vector<int> multi_index(std::size_t flat) const;

  TensorField& operator+=(const TensorField& other);
  TensorField& operator-=(const TensorField& other);
  TensorField& operator*=(cplx s);

  // Largest component magnitude over all points.
  double max_abs() const;

 private:
  Grid grid_;
  std::vector<Slot> signature_;
  std::vector<ScalarField> comps_;
};

TensorField operator-(TensorField a, const TensorField& b);

// Christoffel-type coefficients C^k_{ij}, entry [(k * n + i) * n + j].  Used
// for the Chern connection of a Kaehler metric and for difference tensors
// between two such connections.
struct Connection {
  Grid grid;
  std::vector<ScalarField> coeff;

  const ScalarField& at(int k, int i, int j) const {
    const int n = grid.dim();
    return coeff[(k * n + i) * n + j];
  }
};

double max_abs(const Connection& c);

}  // namespace krf
