#include <doctest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "chainforge/corpus.hpp"
#include "chainforge/error.hpp"
#include "chainforge/synth.hpp"
#include "test_support.hpp"

using namespace chainforge;
using testing::fixture;

TEST_CASE("ingest fixture of 3 threads / 7 posts") {
  const auto r = ingest_jsonl(fixture("three_threads.jsonl"));
  CHECK(r.report.rejected.empty());
  CHECK(r.report.accepted == 7);
  const auto s = corpus_stats(r.corpus);
  CHECK(s.total_messages == 7);
  CHECK(s.total_threads == 3);
  CHECK(s.total_replies == 4);
  CHECK(s.unique_authors == 6);  // alice bob carol dave erin frank
  REQUIRE(s.date_range.has_value());
  CHECK(s.date_range->min == 1000);
  CHECK(s.date_range->max == 3100);

  const auto& c = r.corpus;
  CHECK(c.thread_ids() == std::vector<ThreadId>{"t1", "t2", "t3"});
  CHECK(c.thread("t1").size() == 3);
  CHECK(c.find("t2-r1")->author == "dave");
  CHECK(c.find("nope") == nullptr);
  CHECK(c.posts_by("bob").size() == 2);
}

TEST_CASE("empty input is a fatal schema error") {
  std::istringstream empty("");
  CHECK_THROWS_AS(ingest_jsonl(empty), SchemaError);
  std::istringstream junk("not json\n{\"post_id\": 1}\n");
  CHECK_THROWS_AS(ingest_jsonl(junk), SchemaError);
}

TEST_CASE("unreadable file is an io error") {
  CHECK_THROWS_AS(ingest_jsonl(fixture("does_not_exist.jsonl")), IoError);
}

TEST_CASE("custom field mapping, derived positions and per-line rejections") {
  const auto schema = SchemaConfig::load(fixture("custom_schema.json"));
  CHECK(schema.id_field == "msg");
  const auto r = ingest_jsonl(fixture("custom_fields.jsonl"), schema);
  REQUIRE(r.report.rejected.size() == 2);
  CHECK(r.report.rejected[0].line == 4);
  CHECK(r.report.rejected[1].line == 6);
  CHECK(r.corpus.forum_name() == "customforum");
  const auto a = r.corpus.thread("A");
  REQUIRE(a.size() == 3);
  // no positions in the dump: timestamp order decides
  CHECK(a[0].post_id == "a0");
  CHECK(a[1].post_id == "a2");
  CHECK(a[2].post_id == "a1");
  CHECK(a[0].timestamp == 1456617600);  // 2016-02-28
  CHECK(r.corpus.thread("B").size() == 1);
}

TEST_CASE("threads without a product post are dropped as orphans") {
  std::istringstream in(
      R"({"post_id":"x1","thread_id":"x","author":"a","timestamp":5,"body":"reply","position":1})"
      "\n"
      R"({"post_id":"y0","thread_id":"y","author":"b","timestamp":6,"body":"product","position":0})"
      "\n");
  const auto r = ingest_jsonl(in);
  CHECK(r.report.orphan_threads == 1);
  CHECK(r.report.orphan_posts == 1);
  CHECK(r.corpus.size() == 1);
}

TEST_CASE("out-of-order timestamps are accepted and counted") {
  std::istringstream in(
      R"({"post_id":"p0","thread_id":"t","author":"a","timestamp":50,"body":"x","position":0})"
      "\n"
      R"({"post_id":"p1","thread_id":"t","author":"b","timestamp":40,"body":"y","position":1})"
      "\n");
  const auto r = ingest_jsonl(in);
  CHECK(r.corpus.size() == 2);
  CHECK(r.report.out_of_order_threads == 1);
}

TEST_CASE("duplicate ids are rejected by the corpus") {
  std::vector<Post> posts{{"p", "t", "a", 1, "x", 0}, {"p", "t", "b", 2, "y", 1}};
  CHECK_THROWS_AS(Corpus::from_posts("f", posts), SchemaError);
}

TEST_CASE("csv adapter handles quoting and embedded newlines") {
  const auto r = ingest_csv(fixture("posts.csv"));
  REQUIRE(r.corpus.size() == 3);
  CHECK(r.corpus.find("x0")->body == "Hosting, bulletproof \"offshore\" servers");
  CHECK(r.corpus.find("x1")->body == "bought\ntwo months");
  CHECK(r.corpus.find("y0")->author == "ben");
}

TEST_CASE("export then ingest preserves every field") {
  std::vector<Post> posts{
      {"p0", "t", "юзер", 1420070400, "body with \"quotes\"\nand a newline\tand tab", 0},
      {"p1", "t", "b", 1420070401, "ΑΒΓ 漢字 emoji \xF0\x9F\x98\x80", 1},
      {"q0", "u", "c", -5, "", 0},
  };
  const auto corpus = Corpus::from_posts("f", posts);
  std::stringstream buf;
  export_jsonl(corpus, buf);
  const auto back = ingest_jsonl(buf).corpus;
  REQUIRE(back.size() == corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) CHECK(back.posts()[i] == corpus.posts()[i]);
}

TEST_CASE("stats of an empty corpus") {
  const auto s = corpus_stats(Corpus{});
  CHECK(s.total_messages == 0);
  CHECK(s.unique_authors == 0);
  CHECK_FALSE(s.date_range.has_value());
}

TEST_CASE("two threads each with one reply by the same user") {
  std::vector<Post> posts{{"a0", "a", "s1", 1, "x", 0},
                          {"a1", "a", "r", 2, "y", 1},
                          {"b0", "b", "s2", 3, "x", 0},
                          {"b1", "b", "r", 4, "y", 1}};
  const auto s = corpus_stats(Corpus::from_posts("f", posts));
  CHECK(s.total_threads == 2);
  CHECK(s.total_replies == 2);
  CHECK(s.unique_authors == 3);
  CHECK(s.total_messages == 4);
}

TEST_CASE("stats json and table") {
  const auto s = corpus_stats(ingest_jsonl(fixture("three_threads.jsonl")).corpus);
  CHECK(forum_stats_from_json(to_json(s)) == s);
  const auto table = format_stats_table("fixture", s);
  CHECK(table.find("messages") != std::string::npos);
  CHECK(table.find("7") != std::string::npos);
}

TEST_CASE("timestamps parse from numbers and ISO strings") {
  using nlohmann::json;
  CHECK(parse_timestamp(json(1457000000)) == 1457000000);
  CHECK(parse_timestamp(json(12.0)) == 12);
  CHECK(parse_timestamp(json("77")) == 77);
  CHECK(parse_timestamp(json("2016-02-28")) == 1456617600);
  CHECK(parse_timestamp(json("2016-02-28T01:02:03Z")) == 1456617600 + 3723);
  CHECK_FALSE(parse_timestamp(json("yesterday")).has_value());
  CHECK_FALSE(parse_timestamp(json(1.5)).has_value());
  CHECK(format_iso8601(1456617600 + 3723) == "2016-02-28T01:02:03Z");
}

TEST_CASE("synthetic dump ingests to the generator's declared counts") {
  auto cfg = SynthConfig::defaults();
  cfg.docs_per_category = 40;
  cfg.vouch_rate = 0.2;
  cfg.planted_chains = {{ProductCategory::crypter, ProductCategory::malware, 3}};
  const auto synth = generate(cfg);
  std::stringstream buf;
  export_jsonl(synth.corpus, buf);
  const auto r = ingest_jsonl(buf);
  CHECK(r.report.rejected.empty());
  CHECK(corpus_stats(r.corpus) == synth.truth.declared_stats);
}
