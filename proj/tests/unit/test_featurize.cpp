#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "chainforge/error.hpp"
#include "chainforge/featurize.hpp"
#include "chainforge/rng.hpp"
#include "chainforge/text.hpp"
#include "test_support.hpp"
#include "tfidf_oracle.hpp"

using namespace chainforge;
namespace text = chainforge::text;
using testing::DenseTfidf;

namespace {

NgramParams exact(std::size_t lo, std::size_t hi, std::size_t min_df = 1, bool normalize = false) {
  return {lo, hi, min_df, 200000, normalize};
}

}  // namespace

TEST_CASE("single document smoothing") {
  const std::vector<std::string> docs{"ab"};
  const auto m = TfidfModel::fit(docs, exact(2, 2));
  REQUIRE(m.dimension() == 1);
  CHECK(m.vocabulary().terms()[0] == "ab");
  CHECK(m.vocabulary().document_frequency()[0] == 1);
  CHECK(m.idf()[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("two-document hand computation") {
  const std::vector<std::string> docs{"abab", "abc"};
  const auto m = TfidfModel::fit(docs, exact(2, 2));
  const std::vector<std::string> expect_terms{"ab", "ba", "bc"};
  CHECK(std::vector<std::string>(m.vocabulary().terms().begin(), m.vocabulary().terms().end()) == expect_terms);
  CHECK(m.idf()[0] == doctest::Approx(1.0));
  // ln(3/2) + 1
  CHECK(m.idf()[1] == doctest::Approx(1.4054651081081644).epsilon(1e-12));
  CHECK(m.idf()[2] == doctest::Approx(1.4054651081081644).epsilon(1e-12));

  // "abab" -> ab, ba, ab
  const auto v = m.transform("abab");
  CHECK(v.at(0) == doctest::Approx(2.0));
  CHECK(v.at(1) == doctest::Approx(1.4054651081081644).epsilon(1e-12));
  CHECK(v.at(2) == 0.0);
  CHECK(v.nnz() == 2);

  NgramParams norm = exact(2, 2);
  norm.normalize = true;
  const auto vn = TfidfModel::fit(docs, norm).transform("abab");
  const double len = std::sqrt(4.0 + 1.4054651081081644 * 1.4054651081081644);
  CHECK(vn.at(0) == doctest::Approx(2.0 / len).epsilon(1e-12));
  CHECK(vn.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("min_df prunes rare terms") {
  const std::vector<std::string> docs{"abab", "abc"};
  const auto m = TfidfModel::fit(docs, exact(2, 2, 2));
  REQUIRE(m.dimension() == 1);
  CHECK(m.vocabulary().terms()[0] == "ab");
}

TEST_CASE("max_features keeps highest df, ties lexicographic") {
  // df: a=3, b=2, c=2, d=1 ; keep 2 -> a, b
  const std::vector<std::string> docs{"abc", "acb", "ad"};
  NgramParams p = exact(1, 1);
  p.max_features = 2;
  const auto m = TfidfModel::fit(docs, p);
  CHECK(std::vector<std::string>(m.vocabulary().terms().begin(), m.vocabulary().terms().end()) ==
        std::vector<std::string>{"a", "b"});
}

TEST_CASE("empty vocabulary and bad params") {
  const std::vector<std::string> empties{"", ""};
  CHECK_THROWS_WITH_AS(TfidfModel::fit(empties, exact(1, 2)), "empty vocabulary", SchemaError);
  CHECK_THROWS_AS(TfidfModel::fit({}, exact(1, 2)), InvalidArgument);
  const std::vector<std::string> docs{"abc"};
  CHECK_THROWS_AS(TfidfModel::fit(docs, exact(3, 2)), InvalidArgument);
  CHECK_THROWS_AS(TfidfModel::fit(docs, exact(0, 2)), InvalidArgument);
  CHECK_THROWS_AS(TfidfModel::fit(docs, exact(1, 9)), InvalidArgument);
}

TEST_CASE("out-of-vocabulary document gives the zero vector") {
  const std::vector<std::string> docs{"abab", "abc"};
  const auto m = TfidfModel::fit(docs, NgramParams{2, 2, 1, 100, true});
  const auto v = m.transform("xyz");
  CHECK(v.empty());
  CHECK(v.dimension() == m.dimension());
}

TEST_CASE("case folding applies before extraction") {
  const std::vector<std::string> docs{"ПРОДАМ", "продам"};
  const auto m = TfidfModel::fit(docs, exact(2, 2, 2));
  CHECK(m.dimension() == 5);
  CHECK(m.transform("ПрОдАм") == m.transform("продам"));
}

TEST_CASE("transform matches the dense reference on random strings") {
  Rng rng(2024);
  const std::u32string alphabet = U"abcde fgЖжΩω";
  auto random_text = [&](std::size_t n) {
    std::u32string s;
    for (std::size_t i = 0; i < n; ++i) s.push_back(alphabet[rng.below(alphabet.size())]);
    return text::encode_utf8(s);
  };
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t lo = 1 + rng.below(5);
    const std::size_t hi = lo + rng.below(6 - lo);
    std::vector<std::string> docs;
    for (int i = 0; i < 20; ++i) docs.push_back(random_text(rng.below(60)));
    NgramParams p{lo, hi, 1 + rng.below(3), 1 + rng.below(400), rng.bernoulli(0.7)};
    bool any = false;
    DenseTfidf ref(docs, p);
    if (ref.terms.empty()) {
      CHECK_THROWS_AS(TfidfModel::fit(docs, p), SchemaError);
      continue;
    }
    const auto m = TfidfModel::fit(docs, p);
    REQUIRE(m.dimension() == ref.terms.size());
    for (std::size_t i = 0; i < ref.terms.size(); ++i) {
      CHECK(m.vocabulary().terms()[i] == ref.terms[i]);
      CHECK(std::abs(m.idf()[i] - ref.idf[i]) < 1e-12);
    }
    for (int q = 0; q < 5; ++q) {
      const auto doc = random_text(rng.below(200));
      const auto dense = ref.transform(doc);
      const auto got = m.transform(doc).to_dense();
      double err = 0.0;
      for (std::size_t i = 0; i < dense.size(); ++i) err = std::max(err, std::abs(dense[i] - got[i]));
      CHECK(err < 1e-9);
      any = true;
    }
    CHECK(any);
  }
}

TEST_CASE("fit is deterministic and order-insensitive in vocabulary") {
  std::vector<std::string> docs{"selling rdp", "buy vps cheap", "rdp access", "cheap rdp"};
  const auto a = TfidfModel::fit(docs, NgramParams{2, 4, 2, 1000, true});
  const auto b = TfidfModel::fit(docs, NgramParams{2, 4, 2, 1000, true});
  CHECK(a.fingerprint() == b.fingerprint());
  std::reverse(docs.begin(), docs.end());
  const auto c = TfidfModel::fit(docs, NgramParams{2, 4, 2, 1000, true});
  CHECK(c.fingerprint() == a.fingerprint());
}

TEST_CASE("sparsity is bounded by distinct in-vocabulary n-grams") {
  const std::vector<std::string> docs{"aaaa", "abab"};
  const auto m = TfidfModel::fit(docs, exact(1, 3));
  const auto v = m.transform("aaaaaaaa");
  CHECK(v.nnz() == 3);  // a, aa, aaa
}

TEST_CASE("save and load reproduce the model exactly") {
  const std::vector<std::string> docs{"selling rdp access", "cheap vps with root", "rdp with admin"};
  const auto m = TfidfModel::fit(docs, NgramParams{1, 3, 1, 50, true});
  testing::TempDir dir("tfidf");
  m.save(dir.file("m.json"));
  const auto back = TfidfModel::load(dir.file("m.json"));
  CHECK(back.fingerprint() == m.fingerprint());
  CHECK(back.params() == m.params());
  CHECK(back.transform("root rdp vps") == m.transform("root rdp vps"));

  auto j = m.to_json();
  j["idf"][0] = 99.0;
  CHECK_THROWS_AS(TfidfModel::from_json(j), SchemaError);
}

TEST_CASE("sparse vector construction") {
  const auto v = SparseVector::from_pairs(5, {{3, 1.0}, {1, 2.0}, {3, 0.5}, {4, 0.0}});
  CHECK(std::vector<SparseVector::Index>(v.indices().begin(), v.indices().end()) ==
        std::vector<SparseVector::Index>{1, 3});
  CHECK(v.at(3) == 1.5);
  CHECK(v.at(0) == 0.0);
  CHECK_THROWS_AS(SparseVector::from_pairs(2, {{2, 1.0}}), InvalidArgument);
  const auto cancel = SparseVector::from_pairs(3, {{1, 1.0}, {1, -1.0}});
  CHECK(cancel.empty());
}
