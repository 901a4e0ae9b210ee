#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "chainforge/error.hpp"
#include "chainforge/graph.hpp"
#include "test_support.hpp"

using namespace chainforge;

namespace {

Corpus three_threads() { return ingest_jsonl(testing::fixture("three_threads.jsonl")).corpus; }
LabelSet three_labels() { return LabelSet::load(testing::fixture("three_threads_labels.json")); }

Post post(std::string id, std::string thread, std::string author, Timestamp t, std::uint32_t pos) {
  return Post{std::move(id), std::move(thread), std::move(author), t, "text", pos};
}

}  // namespace

TEST_CASE("single buy reply makes one edge") {
  const auto corpus = Corpus::from_posts("f", {post("p0", "t", "A", 10, 0), post("r1", "t", "B", 20, 1)});
  LabelSet labels;
  labels.products["p0"] = ProductCategory::crypter;
  labels.replies["r1"] = ReplyLabel::buy;
  const auto g = build_graph(corpus, labels, GraphMode::filtered);
  REQUIRE(g.edges().size() == 1);
  const auto& e = g.edges()[0];
  CHECK(e.seller == "A");
  CHECK(e.buyer == "B");
  CHECK(e.category == ProductCategory::crypter);
  CHECK(e.purchase_time == 20);
  CHECK(e.sell_time == 10);
  CHECK(e.sell_post == "p0");
  CHECK(e.buy_reply == "r1");
  CHECK(g.nodes() == std::vector<UserId>{"A", "B"});
}

TEST_CASE("two chained threads") {
  const auto g = build_graph(three_threads(), three_labels(), GraphMode::filtered);
  REQUIRE(g.edges().size() == 2);
  CHECK(g.edges()[0].seller == "alice");
  CHECK(g.edges()[0].buyer == "bob");
  CHECK(g.edges()[1].seller == "bob");
  CHECK(g.edges()[1].buyer == "dave");
  CHECK(g.edges()[1].category == ProductCategory::ddos_service);
  CHECK(g.purchases_of("bob").size() == 1);
  CHECK(g.sales_of("bob").size() == 1);
  CHECK(g.purchases_of("nobody").empty());
  CHECK(g.counters.other_threads == 1);
  CHECK(g.counters.non_buy_replies == 1);
}

TEST_CASE("baseline counts every non-self reply on non-other threads") {
  const auto corpus = three_threads();
  const auto labels = three_labels();
  const auto base = build_graph(corpus, labels, GraphMode::baseline);
  // t1 has two replies, t2 one, t3 is `other`
  CHECK(base.edges().size() == 3);
  const auto filt = build_graph(corpus, labels, GraphMode::filtered);
  for (const auto& e : filt.edges()) {
    CHECK(std::find(base.edges().begin(), base.edges().end(), e) != base.edges().end());
  }
}

TEST_CASE("self replies, unlabeled threads and early replies are skipped") {
  const auto corpus = Corpus::from_posts(
      "f", {post("a0", "a", "A", 100, 0), post("a1", "a", "A", 110, 1), post("a2", "a", "B", 50, 2),
            post("a3", "a", "C", 120, 3), post("b0", "b", "D", 100, 0), post("b1", "b", "E", 130, 1)});
  LabelSet labels;
  labels.products["a0"] = ProductCategory::proxy;
  for (auto id : {"a1", "a2", "a3", "b1"}) labels.replies[id] = ReplyLabel::buy;
  labels.replies["ghost"] = ReplyLabel::buy;
  const auto g = build_graph(corpus, labels, GraphMode::filtered);
  REQUIRE(g.edges().size() == 1);
  CHECK(g.edges()[0].buyer == "C");
  CHECK(g.counters.self_replies == 1);
  CHECK(g.counters.early_replies == 1);
  CHECK(g.counters.unlabeled_threads == 1);
  CHECK(g.counters.dangling_labels == 1);
}

TEST_CASE("repeat purchases are parallel edges") {
  const auto corpus = Corpus::from_posts(
      "f", {post("p0", "t", "A", 10, 0), post("r1", "t", "B", 20, 1), post("r2", "t", "B", 30, 2)});
  LabelSet labels;
  labels.products["p0"] = ProductCategory::hosting;
  labels.replies["r1"] = ReplyLabel::buy;
  labels.replies["r2"] = ReplyLabel::buy;
  CHECK(build_graph(corpus, labels, GraphMode::filtered).edges().size() == 2);
}

TEST_CASE("sell replies do not create edges in filtered mode") {
  const auto corpus = Corpus::from_posts("f", {post("p0", "t", "A", 10, 0), post("r1", "t", "B", 20, 1)});
  LabelSet labels;
  labels.products["p0"] = ProductCategory::hosting;
  labels.replies["r1"] = ReplyLabel::sell;
  const auto g = build_graph(corpus, labels, GraphMode::filtered);
  CHECK(g.empty());
  CHECK(g.counters.sell_replies == 1);
  const auto b = build_graph(corpus, labels, GraphMode::baseline);
  REQUIRE(b.edges().size() == 1);
  CHECK(b.edges()[0].reply_label == ReplyLabel::sell);
}

TEST_CASE("edges round-trip through JSON Lines and rebuilds are identical") {
  const auto corpus = three_threads();
  const auto labels = three_labels();
  const auto g = build_graph(corpus, labels, GraphMode::baseline);
  std::stringstream a, b;
  write_edges_jsonl(g, a);
  write_edges_jsonl(build_graph(corpus, labels, GraphMode::baseline), b);
  CHECK(a.str() == b.str());
  const auto back = read_edges_jsonl(a);
  CHECK(back.mode() == GraphMode::baseline);
  CHECK(back.edges() == g.edges());

  std::stringstream bad("{\"format\":\"something.else\"}\n");
  CHECK_THROWS_AS(read_edges_jsonl(bad), Error);
}

TEST_CASE("summary counts per category") {
  const auto s = summarize(build_graph(three_threads(), three_labels(), GraphMode::filtered));
  CHECK(s.nodes == 3);
  CHECK(s.edges == 2);
  CHECK(s.per_category.at(ProductCategory::crypter) == 1);
  CHECK(s.per_category.at(ProductCategory::ddos_service) == 1);
  CHECK(parse_graph_mode("baseline") == GraphMode::baseline);
  CHECK_THROWS(parse_graph_mode("nope"));
}
