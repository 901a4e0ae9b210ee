#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace chainforge {

/// Sparse real vector with strictly increasing indices and no stored zeros.
class SparseVector {
 public:
  using Index = std::uint32_t;

  SparseVector() = default;
  explicit SparseVector(std::size_t dimension) : dimension_(dimension) {}

  /// Builds from unsorted (index, value) pairs. Duplicate indices are summed,
  /// zeros dropped. Throws InvalidArgument if an index is out of range.
  static SparseVector from_pairs(std::size_t dimension,
                                 std::vector<std::pair<Index, double>> pairs);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t nnz() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }

  std::span<const Index> indices() const noexcept { return indices_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Value at `index` (0 if not stored).
  double at(Index index) const noexcept;

  double squared_norm() const noexcept;
  double norm() const noexcept { return std::sqrt(squared_norm()); }

  /// Scales to unit L2 norm; a zero vector stays zero.
  void normalize() noexcept;

  double dot(std::span<const double> dense) const noexcept {
    double s = 0.0;
    for (std::size_t k = 0; k < indices_.size(); ++k) s += values_[k] * dense[indices_[k]];
    return s;
  }

  std::vector<double> to_dense() const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::size_t dimension_ = 0;
  std::vector<Index> indices_;
  std::vector<double> values_;
};

}  // namespace chainforge
