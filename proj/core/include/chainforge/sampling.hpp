#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace chainforge {

struct FoldAssignment {
  /// Sorted example indices per fold; folds partition [0, n).
  std::vector<std::vector<std::size_t>> folds;
  std::vector<std::string> warnings;

  /// Complement of fold `f`, sorted.
  std::vector<std::size_t> training_indices(std::size_t f) const;
};

/// Stratified k-fold split: every class is shuffled (seeded) and dealt
/// round-robin, so per-class counts in any two folds differ by at most one.
/// Throws InvalidArgument if k < 2 or labels is empty. A class with fewer
/// than k examples yields a warning.
FoldAssignment stratified_kfold(std::span<const std::uint32_t> labels, std::size_t k,
                                std::uint64_t seed);

/// Shrink target: strictly below another class's support, or an absolute size.
struct BelowClass {
  std::uint32_t label;
};
struct AbsoluteCount {
  std::size_t count;
};
using UndersampleTarget = std::variant<BelowClass, AbsoluteCount>;

struct UndersampleResult {
  /// Sorted indices of the examples kept.
  std::vector<std::size_t> kept;
  std::vector<std::string> warnings;
};

/// Uniform seeded subset of `shrink` down to the target size; other classes
/// are untouched. A target >= current support is a no-op with a warning.
/// Throws InvalidArgument when `shrink` does not occur.
UndersampleResult undersample(std::span<const std::uint32_t> labels, std::uint32_t shrink,
                              const UndersampleTarget& target, std::uint64_t seed);

/// Seeded class-proportional subset of `pool` (indices into `labels`) of
/// exactly `size` elements, using largest-remainder allocation. Returns the
/// whole pool when size >= pool.size().
std::vector<std::size_t> stratified_subsample(std::span<const std::uint32_t> labels,
                                              std::span<const std::size_t> pool, std::size_t size,
                                              std::uint64_t seed);

/// Parses "below:<name>" or a non-negative integer; `resolve` maps a class
/// name to its label index.
template <typename Resolve>
UndersampleTarget parse_undersample_target(const std::string& spec, Resolve&& resolve) {
  if (spec.rfind("below:", 0) == 0) return BelowClass{resolve(spec.substr(6))};
  return AbsoluteCount{static_cast<std::size_t>(std::stoull(spec))};
}

}  // namespace chainforge
