#include <doctest.h>

#include <algorithm>

#include <nlohmann/json.hpp>

#include "chainforge/error.hpp"
#include "chainforge/metrics.hpp"
#include "chainforge/rng.hpp"

using namespace chainforge;

namespace {

// Expand a confusion matrix into (truth, prediction) pairs.
void expand(const std::vector<std::vector<std::size_t>>& cm, std::vector<std::uint32_t>& truth,
            std::vector<std::uint32_t>& pred) {
  for (std::uint32_t t = 0; t < cm.size(); ++t)
    for (std::uint32_t p = 0; p < cm[t].size(); ++p)
      for (std::size_t k = 0; k < cm[t][p]; ++k) {
        truth.push_back(t);
        pred.push_back(p);
      }
}

const std::vector<std::string> kAB{"A", "B"};

}  // namespace

TEST_CASE("perfect predictions score 1 everywhere") {
  const std::vector<std::uint32_t> y{0, 1, 1, 0, 1};
  const auto r = evaluate(y, y, kAB);
  CHECK(r.weighted_precision == 1.0);
  CHECK(r.weighted_recall == 1.0);
  CHECK(r.weighted_f1 == 1.0);
  CHECK(r.accuracy == 1.0);
  CHECK(r.macro_f1 == 1.0);
}

TEST_CASE("two-class confusion [[8,2],[3,7]] by hand") {
  std::vector<std::uint32_t> truth, pred;
  expand({{8, 2}, {3, 7}}, truth, pred);
  const auto r = evaluate(pred, truth, kAB, 1u);

  const double pa = 8.0 / 11.0, ra = 8.0 / 10.0, fa = 2 * pa * ra / (pa + ra);
  const double pb = 7.0 / 9.0, rb = 7.0 / 10.0, fb = 2 * pb * rb / (pb + rb);
  CHECK(r.per_class[0].precision == doctest::Approx(pa).epsilon(1e-12));
  CHECK(r.per_class[0].recall == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(r.per_class[0].f1 == doctest::Approx(fa).epsilon(1e-12));
  CHECK(r.per_class[1].f1 == doctest::Approx(fb).epsilon(1e-12));
  CHECK(r.per_class[0].support == 10);
  CHECK(r.weighted_precision == doctest::Approx((pa + pb) / 2).epsilon(1e-12));
  CHECK(r.weighted_recall == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(r.weighted_f1 == doctest::Approx((fa + fb) / 2).epsilon(1e-12));
  CHECK(r.accuracy == doctest::Approx(0.75));
  // B plays `other`: only A counts
  CHECK(r.weighted_non_other_precision == doctest::Approx(pa).epsilon(1e-12));
  CHECK(r.confusion == std::vector<std::vector<std::size_t>>{{8, 2}, {3, 7}});
}

TEST_CASE("zero denominators score 0 and rows sum to support") {
  const std::vector<std::string> names{"a", "b", "c"};
  const std::vector<std::uint32_t> truth{0, 0, 1, 1};
  const std::vector<std::uint32_t> pred{0, 0, 0, 0};
  const auto r = evaluate(pred, truth, names);
  CHECK(r.per_class[1].precision == 0.0);
  CHECK(r.per_class[1].f1 == 0.0);
  CHECK(r.per_class[2].support == 0);
  for (std::size_t c = 0; c < 3; ++c) {
    std::size_t row = 0;
    for (auto v : r.confusion[c]) row += v;
    CHECK(row == r.per_class[c].support);
  }
  CHECK(r.weighted_non_other_precision == r.weighted_precision);
}

TEST_CASE("weighted non-other precision weights by support of the remaining classes") {
  const std::vector<std::string> names{"x", "y", "other"};
  std::vector<std::uint32_t> truth, pred;
  expand({{3, 1, 0}, {0, 5, 1}, {2, 2, 6}}, truth, pred);
  const auto r = evaluate(pred, truth, names, 2u);
  const double px = 3.0 / 5.0, py = 5.0 / 8.0;
  CHECK(r.weighted_non_other_precision == doctest::Approx((4 * px + 6 * py) / 10).epsilon(1e-12));
}

TEST_CASE("evaluate is permutation invariant") {
  Rng rng(12);
  std::vector<std::uint32_t> truth, pred;
  for (int i = 0; i < 100; ++i) {
    truth.push_back(static_cast<std::uint32_t>(rng.below(4)));
    pred.push_back(static_cast<std::uint32_t>(rng.below(4)));
  }
  const std::vector<std::string> names{"a", "b", "c", "d"};
  const auto a = evaluate(pred, truth, names, 3u);
  std::vector<std::size_t> order(truth.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::uint32_t> t2, p2;
  for (auto i : order) {
    t2.push_back(truth[i]);
    p2.push_back(pred[i]);
  }
  const auto b = evaluate(p2, t2, names, 3u);
  CHECK(a.to_json() == b.to_json());
}

TEST_CASE("evaluate input errors") {
  const std::vector<std::uint32_t> empty;
  CHECK_THROWS_AS(evaluate(empty, empty, kAB), InvalidArgument);
  const std::vector<std::uint32_t> one{0}, two{0, 1};
  CHECK_THROWS_AS(evaluate(one, two, kAB), InvalidArgument);
  const std::vector<std::uint32_t> bad{5};
  CHECK_THROWS_AS(evaluate(bad, one, kAB), InvalidArgument);
}

TEST_CASE("confusion csv and table") {
  std::vector<std::uint32_t> truth, pred;
  expand({{8, 2}, {3, 7}}, truth, pred);
  const auto r = evaluate(pred, truth, kAB);
  CHECK(r.confusion_csv() == "truth,A,B\nA,8,2\nB,3,7\n");
  CHECK(r.to_table().find("weighted") != std::string::npos);
  const auto j = r.to_json();
  CHECK(j.at("confusion")[1][0] == 3);
}
