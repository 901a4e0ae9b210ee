#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>

#include "chainforge/error.hpp"
#include "chainforge/rng.hpp"
#include "chainforge/sampling.hpp"

using namespace chainforge;

namespace {

std::size_t count_in(const std::vector<std::size_t>& fold, const std::vector<std::uint32_t>& labels,
                     std::uint32_t c) {
  return static_cast<std::size_t>(
      std::count_if(fold.begin(), fold.end(), [&](std::size_t i) { return labels[i] == c; }));
}

std::vector<std::uint32_t> repeat(std::vector<std::pair<std::uint32_t, std::size_t>> spec) {
  std::vector<std::uint32_t> out;
  for (auto [c, n] : spec) out.insert(out.end(), n, c);
  return out;
}

}  // namespace

TEST_CASE("balanced ten and ten over five folds gives two of each") {
  const auto labels = repeat({{0, 10}, {1, 10}});
  const auto f = stratified_kfold(labels, 5, 3);
  REQUIRE(f.folds.size() == 5);
  for (const auto& fold : f.folds) {
    CHECK(count_in(fold, labels, 0) == 2);
    CHECK(count_in(fold, labels, 1) == 2);
  }
  CHECK(f.warnings.empty());
}

TEST_CASE("seven and three over three folds") {
  const auto labels = repeat({{0, 7}, {1, 3}});
  const auto f = stratified_kfold(labels, 3, 11);
  for (const auto& fold : f.folds) {
    const auto a = count_in(fold, labels, 0);
    CHECK((a == 2 || a == 3));
    CHECK(count_in(fold, labels, 1) == 1);
  }
}

TEST_CASE("k-fold property over random multisets") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const auto k = static_cast<std::size_t>(2 + rng.below(9));
    const auto classes = static_cast<std::uint32_t>(1 + rng.below(6));
    std::vector<std::uint32_t> labels;
    const auto n = 1 + rng.below(200);
    for (std::uint64_t i = 0; i < n; ++i) labels.push_back(static_cast<std::uint32_t>(rng.below(classes)));

    const auto f = stratified_kfold(labels, k, static_cast<std::uint64_t>(trial));
    REQUIRE(f.folds.size() == k);
    std::vector<std::size_t> all;
    for (const auto& fold : f.folds) all.insert(all.end(), fold.begin(), fold.end());
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expect(labels.size());
    std::iota(expect.begin(), expect.end(), std::size_t{0});
    CHECK(all == expect);
    for (std::uint32_t c = 0; c < classes; ++c) {
      std::size_t lo = labels.size(), hi = 0;
      for (const auto& fold : f.folds) {
        lo = std::min(lo, count_in(fold, labels, c));
        hi = std::max(hi, count_in(fold, labels, c));
      }
      CHECK(hi - lo <= 1);
    }
  }
}

TEST_CASE("k-fold is seeded and validates its inputs") {
  const auto labels = repeat({{0, 30}, {1, 17}});
  CHECK(stratified_kfold(labels, 4, 9).folds == stratified_kfold(labels, 4, 9).folds);
  CHECK(stratified_kfold(labels, 4, 9).folds != stratified_kfold(labels, 4, 10).folds);
  CHECK_THROWS_AS(stratified_kfold(labels, 1, 1), InvalidArgument);
  CHECK_THROWS_AS(stratified_kfold(std::vector<std::uint32_t>{}, 3, 1), InvalidArgument);
  const auto rare = repeat({{0, 10}, {1, 2}});
  CHECK(stratified_kfold(rare, 5, 1).warnings.size() == 1);
}

TEST_CASE("training indices are the complement of a fold") {
  const auto labels = repeat({{0, 6}, {1, 6}});
  const auto f = stratified_kfold(labels, 3, 5);
  const auto tr = f.training_indices(1);
  CHECK(tr.size() == 8);
  for (auto i : f.folds[1]) CHECK(std::find(tr.begin(), tr.end(), i) == tr.end());
  CHECK(std::is_sorted(tr.begin(), tr.end()));
}

TEST_CASE("undersample account below other") {
  // 0 = account, 1 = other
  const auto labels = repeat({{0, 5000}, {1, 4000}});
  const auto r = undersample(labels, 0, BelowClass{1}, 17);
  CHECK(r.warnings.empty());
  std::map<std::uint32_t, std::size_t> counts;
  for (auto i : r.kept) ++counts[labels[i]];
  CHECK(counts[0] == 3999);
  CHECK(counts[1] == 4000);
  CHECK(std::is_sorted(r.kept.begin(), r.kept.end()));
  CHECK(undersample(labels, 0, BelowClass{1}, 17).kept == r.kept);
  CHECK(undersample(labels, 0, BelowClass{1}, 18).kept != r.kept);
}

TEST_CASE("undersample with a target above support is a no-op with a warning") {
  const auto labels = repeat({{0, 50}, {1, 80}});
  const auto r = undersample(labels, 0, AbsoluteCount{100}, 1);
  CHECK(r.kept.size() == 130);
  CHECK(r.warnings.size() == 1);
  CHECK_THROWS_AS(undersample(labels, 7, AbsoluteCount{1}, 1), InvalidArgument);
}

TEST_CASE("parse undersample target") {
  auto resolve = [](const std::string& name) -> std::uint32_t { return name == "account" ? 3u : 99u; };
  const auto below = parse_undersample_target("below:account", resolve);
  REQUIRE(std::holds_alternative<BelowClass>(below));
  CHECK(std::get<BelowClass>(below).label == 3);
  const auto abs = parse_undersample_target("250", resolve);
  REQUIRE(std::holds_alternative<AbsoluteCount>(abs));
  CHECK(std::get<AbsoluteCount>(abs).count == 250);
}

TEST_CASE("stratified subsample keeps proportions") {
  const auto labels = repeat({{0, 60}, {1, 30}, {2, 10}});
  std::vector<std::size_t> pool(labels.size());
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  const auto s = stratified_subsample(labels, pool, 20, 4);
  REQUIRE(s.size() == 20);
  std::map<std::uint32_t, std::size_t> counts;
  for (auto i : s) ++counts[labels[i]];
  CHECK(counts[0] == 12);
  CHECK(counts[1] == 6);
  CHECK(counts[2] == 2);
  CHECK(stratified_subsample(labels, pool, 500, 4) == pool);

  // largest remainder: 7 of {5,3,2} -> exact 3.5, 2.1, 1.4 -> 4, 2, 1
  const auto small = repeat({{0, 5}, {1, 3}, {2, 2}});
  std::vector<std::size_t> p2(small.size());
  std::iota(p2.begin(), p2.end(), std::size_t{0});
  std::map<std::uint32_t, std::size_t> c2;
  for (auto i : stratified_subsample(small, p2, 7, 1)) ++c2[small[i]];
  CHECK(c2[0] == 4);
  CHECK(c2[1] == 2);
  CHECK(c2[2] == 1);
}
