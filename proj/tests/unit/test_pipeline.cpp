#include <doctest.h>

#include <filesystem>

#include <nlohmann/json.hpp>

#include "chainforge/pipeline.hpp"
#include "chainforge/synth.hpp"
#include "test_support.hpp"

using namespace chainforge;
using PC = ProductCategory;
namespace fs = std::filesystem;

namespace {

SynthConfig tiny(std::uint64_t seed) {
  auto c = SynthConfig::defaults();
  c.seed = seed;
  c.docs_per_category = 40;
  c.n_sellers = 80;
  c.n_buyers = 300;
  c.vouch_rate = 0.2;
  c.planted_chains = {{PC::crypter, PC::ddos_service, 3}, {PC::hosting, PC::proxy, 2}};
  return c;
}

// Trains both task models on a seed-99 corpus once per test binary.
struct Models {
  testing::TempDir dir{"models"};
  std::string product = dir.file("product.json");
  std::string reply = dir.file("reply.json");

  Models() {
    const auto s = generate(tiny(99));
    const auto clean = clean_corpus_text(s.corpus);
    ModelTrainOptions opt;
    opt.train.epochs = 15;
    train_task_model(build_dataset(Task::product, s.corpus, s.truth.labels, clean), opt).save(product);
    train_task_model(build_dataset(Task::reply, s.corpus, s.truth.labels, clean), opt).save(reply);
  }
};

const Models& models() {
  static Models m;
  return m;
}

PipelineConfig config_for(const std::string& data_dir, const std::string& out) {
  PipelineConfig c;
  c.corpus = data_dir + "/corpus.jsonl";
  c.truth = data_dir + "/truth.json";
  c.product_model = models().product;
  c.reply_model = models().reply;
  c.output_dir = out;
  return c;
}

}  // namespace

TEST_CASE("task model save and load predict identically") {
  const auto a = TaskModel::load(models().product);
  const auto b = TaskModel::from_json(a.to_json());
  CHECK(a.predict("fud crypter stub runtime") == b.predict("fud crypter stub runtime"));
  CHECK(a.task == Task::product);
  CHECK(class_names(Task::product).size() == kProductCategoryCount);
  CHECK(class_names(Task::product)[other_class(Task::product)] == "other");
  CHECK(class_names(Task::reply)[other_class(Task::reply)] == "other");

  auto j = a.to_json();
  j["classifier"]["feature_fingerprint"] = "0000000000003039";
  CHECK_THROWS_AS(TaskModel::from_json(j), SchemaError);
}

TEST_CASE("end-to-end run writes every artifact with a manifest") {
  testing::TempDir work("pipeline");
  write_synth(generate(tiny(42)), work.file("data"));
  const auto cfg = config_for(work.file("data"), work.file("out"));
  const auto r = run_pipeline(cfg);

  for (auto name : {"stats.json", "metrics.json", "edges.jsonl", "links.jsonl", "supply_graph.json",
                    "alluvial.json", "trends.csv", "manifest.json", "product_confusion.csv",
                    "reply_confusion.csv"}) {
    INFO(name);
    CHECK(fs::exists(work.path() / "out" / name));
  }
  const auto manifest = nlohmann::json::parse(testing::slurp(work.path() / "out" / "manifest.json"));
  CHECK(manifest["config_hash"] == cfg.hash());
  CHECK(manifest.contains("library_version"));
  CHECK(manifest["artifacts"].contains("links.jsonl"));
  CHECK(!manifest["config"].contains("output_dir"));

  const auto metrics = nlohmann::json::parse(testing::slurp(work.path() / "out" / "metrics.json"));
  CHECK(metrics["format"] == "chainforge.metrics");
  CHECK(metrics["planted"]["planted"] == 5);
  CHECK(r.metrics["planted"]["recall"].get<double>() >= 0.8);
  CHECK(r.links > 0);

  const auto alluvial = nlohmann::json::parse(testing::slurp(work.path() / "out" / "alluvial.json"));
  CHECK(alluvial["format"] == "chainforge.alluvial");
  CHECK(testing::slurp(work.path() / "out" / "product_confusion.csv").rfind("truth,account,", 0) == 0);
}

TEST_CASE("rerun into another directory gives byte-identical artifacts") {
  testing::TempDir work("pipeline-det");
  write_synth(generate(tiny(42)), work.file("data"));
  const auto a = run_pipeline(config_for(work.file("data"), work.file("a")));
  const auto b = run_pipeline(config_for(work.file("data"), work.file("b")));
  CHECK(a.artifacts == b.artifacts);
  for (const auto& [name, hash] : a.artifacts) {
    INFO(name);
    CHECK(testing::slurp(work.path() / "a" / name) == testing::slurp(work.path() / "b" / name));
  }
}

TEST_CASE("a missing model is reported against its stage") {
  testing::TempDir work("pipeline-missing");
  write_synth(generate(tiny(1)), work.file("data"));
  auto cfg = config_for(work.file("data"), work.file("out"));
  cfg.reply_model = work.file("nope.json");
  try {
    run_pipeline(cfg);
    FAIL("expected a StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "load_models");
    CHECK(std::string(e.what()).find("nope.json") != std::string::npos);
  }

  cfg = config_for(work.file("data"), work.file("out"));
  cfg.corpus = work.file("absent.jsonl");
  try {
    run_pipeline(cfg);
    FAIL("expected a StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "ingest");
  }
}

TEST_CASE("pipeline config parsing") {
  const auto j = nlohmann::json{{"corpus", "c.jsonl"}, {"product_model", "p"}, {"reply_model", "r"},
                                {"output_dir", "o"},   {"graph_mode", "baseline"}, {"traversal", "bfs"},
                                {"max_gap_days", 30}};
  const auto c = PipelineConfig::from_json(j);
  CHECK(c.graph_mode == GraphMode::baseline);
  CHECK(c.traversal == Traversal::bfs);
  CHECK(c.max_gap_days == 30.0);
  auto moved = c;
  moved.output_dir = "elsewhere";
  CHECK(moved.hash() == c.hash());
  auto changed = c;
  changed.min_quote_chars = 10;
  CHECK(changed.hash() != c.hash());
  CHECK_THROWS_AS(PipelineConfig::from_json(nlohmann::json{{"corpus", "x"}}), SchemaError);
  CHECK_THROWS(PipelineConfig::from_json(
      nlohmann::json{{"corpus", "c"}, {"product_model", "p"}, {"reply_model", "r"}, {"output_dir", "o"},
                     {"alluvial_filter", {"nonsense"}}}));
}
