#include "krf/tensor.hpp"

#include <algorithm>
#include <stdexcept>

namespace krf {

TensorField::TensorField(const Grid& grid, std::vector<Slot> signature)
    : grid_(grid), signature_(std::move(signature)) {
  std::size_t count = 1;
  for (std::size_t s = 0; s < signature_.size(); ++s) count *= static_cast<std::size_t>(grid.dim());
  comps_.assign(count, ScalarField(grid));
}

std::size_t TensorField::flat_index(std::initializer_list<int> idx) const {
  if (idx.size() != signature_.size()) throw std::invalid_argument("index rank mismatch");
  std::size_t flat = 0;
  for (int i : idx) flat = flat * static_cast<std::size_t>(dim()) + static_cast<std::size_t>(i);
  return flat;
}

std::size_t TensorField::flat_index(const std::vector<int>& idx) const {
  if (idx.size() != signature_.size()) throw std::invalid_argument("index rank mismatch");
  std::size_t flat = 0;
  for (int i : idx) flat = flat * static_cast<std::size_t>(dim()) + static_cast<std::size_t>(i);
  return flat;
}

std::vector<int> TensorField::multi_index(std::size_t flat) const {
  std::vector<int> idx(signature_.size());
  for (int s = rank() - 1; s >= 0; --s) {
    idx[s] = static_cast<int>(flat % static_cast<std::size_t>(dim()));
    flat /= static_cast<std::size_t>(dim());
  }
  return idx;
}

TensorField& TensorField::operator+=(const TensorField& other) {
  if (other.signature_ != signature_) throw std::invalid_argument("signature mismatch");
  for (std::size_t c = 0; c < comps_.size(); ++c) comps_[c] += other.comps_[c];
  return *this;
}

TensorField& TensorField::operator-=(const TensorField& other) {
  if (other.signature_ != signature_) throw std::invalid_argument("signature mismatch");
  for (std::size_t c = 0; c < comps_.size(); ++c) comps_[c] -= other.comps_[c];
  return *this;
}

TensorField& TensorField::operator*=(cplx s) {
  for (auto& c : comps_) c *= s;
  return *this;
}

double TensorField::max_abs() const {
  double m = 0.0;
  for (const auto& c : comps_) m = std::max(m, c.max_abs());
  return m;
}

TensorField operator-(TensorField a, const TensorField& b) { return a -= b; }

double max_abs(const Connection& c) {
  double m = 0.0;
  for (const auto& f : c.coeff) m = std::max(m, f.max_abs());
  return m;
}

}  // namespace krf
