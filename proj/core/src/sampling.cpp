#include "chainforge/sampling.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "chainforge/error.hpp"
#include "chainforge/rng.hpp"

namespace chainforge {

std::vector<std::size_t> FoldAssignment::training_indices(std::size_t f) const {
  std::vector<std::size_t> out;
  for (std::size_t g = 0; g < folds.size(); ++g) {
    if (g != f) out.insert(out.end(), folds[g].begin(), folds[g].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

FoldAssignment stratified_kfold(std::span<const std::uint32_t> labels, std::size_t k,
                                std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("stratified_kfold requires k >= 2");
  if (labels.empty()) throw InvalidArgument("stratified_kfold requires at least one label");
  std::map<std::uint32_t, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  FoldAssignment out;
  out.folds.resize(k);
  Rng rng(seed);
  // Continuing the deal where the previous class stopped keeps total fold
  // sizes within one of each other as well.
  std::size_t next = 0;
  for (auto& [label, idx] : by_class) {
    if (idx.size() < k) {
      out.warnings.push_back("class " + std::to_string(label) + " has " +
                             std::to_string(idx.size()) + " examples, fewer than k=" +
                             std::to_string(k) + "; some folds miss it");
    }
    rng.shuffle(std::span<std::size_t>(idx));
    for (auto i : idx) {
      out.folds[next].push_back(i);
      next = (next + 1) % k;
    }
  }
  for (auto& f : out.folds) std::sort(f.begin(), f.end());
  return out;
}

UndersampleResult undersample(std::span<const std::uint32_t> labels, std::uint32_t shrink,
                              const UndersampleTarget& target, std::uint64_t seed) {
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == shrink) members.push_back(i);
  }
  if (members.empty()) {
    throw InvalidArgument("class " + std::to_string(shrink) + " is not present");
  }
  std::size_t size = 0;
  if (const auto* below = std::get_if<BelowClass>(&target)) {
    const auto ref = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), below->label));
    size = ref == 0 ? 0 : ref - 1;
  } else {
    size = std::get<AbsoluteCount>(target).count;
  }

  UndersampleResult out;
  if (size >= members.size()) {
    out.warnings.push_back("undersample target " + std::to_string(size) +
                           " is not below current support " + std::to_string(members.size()) +
                           "; unchanged");
    out.kept.resize(labels.size());
    std::iota(out.kept.begin(), out.kept.end(), std::size_t{0});
    return out;
  }
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(members));
  members.resize(size);
  std::sort(members.begin(), members.end());
  auto m = members.begin();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != shrink) {
      out.kept.push_back(i);
    } else if (m != members.end() && *m == i) {
      out.kept.push_back(i);
      ++m;
    }
  }
  return out;
}

std::vector<std::size_t> stratified_subsample(std::span<const std::uint32_t> labels,
                                              std::span<const std::size_t> pool, std::size_t size,
                                              std::uint64_t seed) {
  std::vector<std::size_t> all(pool.begin(), pool.end());
  std::sort(all.begin(), all.end());
  if (size >= all.size()) return all;

  std::map<std::uint32_t, std::vector<std::size_t>> by_class;
  for (auto i : all) by_class[labels[i]].push_back(i);

  // Largest-remainder allocation of `size` across classes.
  struct Share {
    std::uint32_t label;
    std::size_t quota;
    double remainder;
  };
  std::vector<Share> shares;
  std::size_t assigned = 0;
  for (const auto& [label, idx] : by_class) {
    const double exact = static_cast<double>(size) * static_cast<double>(idx.size()) /
                         static_cast<double>(all.size());
    const auto q = static_cast<std::size_t>(exact);
    shares.push_back({label, q, exact - static_cast<double>(q)});
    assigned += q;
  }
  std::vector<std::size_t> order(shares.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return shares[a].remainder > shares[b].remainder;
  });
  for (std::size_t k = 0; assigned < size; k = (k + 1) % order.size()) {
    auto& s = shares[order[k]];
    if (s.quota < by_class[s.label].size()) {
      ++s.quota;
      ++assigned;
    }
  }

  Rng rng(seed);
  std::vector<std::size_t> out;
  for (const auto& s : shares) {
    auto idx = by_class[s.label];
    rng.shuffle(std::span<std::size_t>(idx));
    out.insert(out.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(s.quota));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace chainforge
