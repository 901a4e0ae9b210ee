#include "chainforge/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "chainforge/metrics.hpp"
#include "chainforge/report.hpp"
#include "chainforge/synth.hpp"
#include "chainforge/text.hpp"

#ifndef CHAINFORGE_VERSION
#define CHAINFORGE_VERSION "0.0.0"
#endif

namespace chainforge {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(Task t) noexcept { return t == Task::product ? "product" : "reply"; }

Task parse_task(std::string_view s) {
  if (s == "product") return Task::product;
  if (s == "reply") return Task::reply;
  throw InvalidArgument("unknown task '" + std::string(s) + "' (expected product or reply)");
}

std::vector<std::string> class_names(Task t) {
  std::vector<std::string> out;
  if (t == Task::product) {
    for (auto c : kAllProductCategories) out.emplace_back(to_string(c));
  } else {
    for (auto r : kAllReplyLabels) out.emplace_back(to_string(r));
  }
  return out;
}

std::uint32_t other_class(Task t) noexcept {
  return static_cast<std::uint32_t>(t == Task::product ? index_of(ProductCategory::other)
                                                       : index_of(ReplyLabel::other));
}

// ---------------------------------------------------------------------------
// TaskModel

std::uint32_t TaskModel::predict(std::string_view text) const {
  return chainforge::predict(classifier, features.transform(text));
}

json TaskModel::to_json() const {
  return {{"format", "chainforge.task_model"},
          {"version", kFormatVersion},
          {"task", to_string(task)},
          {"features", features.to_json()},
          {"classifier", classifier.to_json()}};
}

TaskModel TaskModel::from_json(const json& j) {
  if (j.value("format", "") != "chainforge.task_model") throw SchemaError("not a task model file");
  if (j.value("version", 0) != kFormatVersion) {
    throw SchemaError("unsupported task model version " + j.at("version").dump());
  }
  TaskModel m;
  m.task = parse_task(j.at("task").get<std::string>());
  m.features = TfidfModel::from_json(j.at("features"));
  m.classifier = LinearModel::from_json(j.at("classifier"));
  if (m.classifier.feature_fingerprint != m.features.fingerprint()) {
    throw SchemaError("classifier was trained on a different featurizer (fingerprint " +
                      text::hex64(m.classifier.feature_fingerprint) + " vs " +
                      text::hex64(m.features.fingerprint()) + ")");
  }
  if (m.classifier.class_names != class_names(m.task)) {
    throw SchemaError("classifier classes do not match task " + std::string(to_string(m.task)));
  }
  return m;
}

void TaskModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model file: " + path);
  out << to_json().dump() << '\n';
}

TaskModel TaskModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path);
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw SchemaError("model file " + path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Datasets and training

TaskDataset build_dataset(Task task, const Corpus& corpus, const LabelSet& labels,
                          const std::map<PostId, std::string>& clean_text) {
  TaskDataset d;
  d.task = task;
  for (const auto& p : corpus.posts()) {
    std::optional<std::uint32_t> label;
    if (task == Task::product && p.is_product_post()) {
      if (auto it = labels.products.find(p.post_id); it != labels.products.end()) {
        label = static_cast<std::uint32_t>(index_of(it->second));
      }
    } else if (task == Task::reply && !p.is_product_post()) {
      if (auto it = labels.replies.find(p.post_id); it != labels.replies.end()) {
        label = static_cast<std::uint32_t>(index_of(it->second));
      }
    }
    if (!label) continue;
    auto text = clean_text.find(p.post_id);
    d.posts.push_back(p.post_id);
    d.docs.push_back(text != clean_text.end() ? text->second : p.body);
    d.labels.push_back(*label);
  }
  return d;
}

std::vector<LabeledExample> featurize_dataset(const TaskDataset& data, const TfidfModel& features) {
  std::vector<LabeledExample> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out.push_back({features.transform(data.docs[i]), data.labels[i], data.posts[i]});
  }
  return out;
}

TaskModel train_task_model(const TaskDataset& data, const ModelTrainOptions& options) {
  if (data.size() == 0) throw InvalidArgument("no labeled examples for task " + std::string(to_string(data.task)));
  const auto names = class_names(data.task);

  TaskDataset used = data;
  if (options.undersample_other) {
    auto target = parse_undersample_target(*options.undersample_other, [&](const std::string& n) {
      auto it = std::find(names.begin(), names.end(), n);
      if (it == names.end()) throw InvalidArgument("unknown class '" + n + "' in undersample target");
      return static_cast<std::uint32_t>(it - names.begin());
    });
    auto kept = undersample(data.labels, other_class(data.task), target, options.undersample_seed).kept;
    used = TaskDataset{data.task, {}, {}, {}};
    for (auto i : kept) {
      used.posts.push_back(data.posts[i]);
      used.docs.push_back(data.docs[i]);
      used.labels.push_back(data.labels[i]);
    }
  }

  TaskModel m;
  m.task = data.task;
  m.features = TfidfModel::fit(used.docs, options.ngrams);
  auto examples = featurize_dataset(used, m.features);
  m.classifier = train(examples, names, options.train, m.features.fingerprint());
  return m;
}

LabelSet predict_labels(const Corpus& corpus, const TaskModel& product_model,
                        const TaskModel& reply_model,
                        const std::map<PostId, std::string>& clean_text) {
  if (product_model.task != Task::product) throw InvalidArgument("product model has task 'reply'");
  if (reply_model.task != Task::reply) throw InvalidArgument("reply model has task 'product'");
  LabelSet out;
  for (const auto& p : corpus.posts()) {
    auto it = clean_text.find(p.post_id);
    const std::string_view text = it != clean_text.end() ? std::string_view(it->second) : p.body;
    if (p.is_product_post()) {
      out.products.emplace(p.post_id, kAllProductCategories[product_model.predict(text)]);
    } else {
      out.replies.emplace(p.post_id, kAllReplyLabels[reply_model.predict(text)]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config

PipelineConfig PipelineConfig::from_json(const json& j) {
  PipelineConfig c;
  try {
    c.corpus = j.at("corpus").get<std::string>();
    c.corpus_format = j.value("corpus_format", c.corpus_format);
    if (c.corpus_format != "jsonl" && c.corpus_format != "csv") {
      throw SchemaError("corpus_format must be jsonl or csv");
    }
    if (j.contains("schema")) c.schema = j.at("schema").get<std::string>();
    c.product_model = j.at("product_model").get<std::string>();
    c.reply_model = j.at("reply_model").get<std::string>();
    c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("graph_mode")) c.graph_mode = parse_graph_mode(j.at("graph_mode").get<std::string>());
    if (j.contains("traversal")) c.traversal = parse_traversal(j.at("traversal").get<std::string>());
    if (j.contains("max_gap_days") && !j.at("max_gap_days").is_null()) {
      c.max_gap_days = j.at("max_gap_days").get<double>();
    }
    c.min_quote_chars = j.value("min_quote_chars", c.min_quote_chars);
    if (j.contains("truth")) c.truth = j.at("truth").get<std::string>();
    if (j.contains("alluvial_filter")) {
      c.alluvial_filter = j.at("alluvial_filter").get<std::vector<std::string>>();
      for (const auto& name : c.alluvial_filter) {
        if (!parse_product_category(name)) throw SchemaError("unknown category '" + name + "' in alluvial_filter");
      }
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("pipeline config: ") + e.what());
  }
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open pipeline config: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw SchemaError("pipeline config " + path + ": " + e.what());
  }
  return from_json(j);
}

json PipelineConfig::to_json() const {
  json j = {{"corpus", corpus},
            {"corpus_format", corpus_format},
            {"product_model", product_model},
            {"reply_model", reply_model},
            {"output_dir", output_dir},
            {"graph_mode", to_string(graph_mode)},
            {"traversal", to_string(traversal)},
            {"max_gap_days", max_gap_days ? json(*max_gap_days) : json(nullptr)},
            {"min_quote_chars", min_quote_chars},
            {"alluvial_filter", alluvial_filter}};
  if (schema) j["schema"] = *schema;
  if (truth) j["truth"] = *truth;
  return j;
}

std::string PipelineConfig::hash() const {
  auto j = to_json();
  j.erase("output_dir");
  return text::hex64(text::fnv1a(j.dump()));
}

// ---------------------------------------------------------------------------
// run_pipeline

namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read back " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json ingest_json(const IngestReport& r) {
  json rejected = json::array();
  for (const auto& e : r.rejected) rejected.push_back({{"line", e.line}, {"message", e.message}});
  return {{"lines_read", r.lines_read},
          {"accepted", r.accepted},
          {"rejected", rejected},
          {"orphan_threads", r.orphan_threads},
          {"orphan_posts", r.orphan_posts},
          {"out_of_order_threads", r.out_of_order_threads}};
}

json counters_json(const BuildCounters& c) {
  return {{"threads_seen", c.threads_seen},
          {"other_threads", c.other_threads},
          {"unlabeled_threads", c.unlabeled_threads},
          {"unlabeled_replies", c.unlabeled_replies},
          {"self_replies", c.self_replies},
          {"non_buy_replies", c.non_buy_replies},
          {"sell_replies", c.sell_replies},
          {"early_replies", c.early_replies},
          {"dangling_labels", c.dangling_labels}};
}

// Scores predictions against gold labels for the posts that carry both.
template <typename Label, typename Map>
MetricsReport score(const Map& predicted, const Map& gold, Task task) {
  std::vector<std::uint32_t> p, t;
  for (const auto& [id, g] : gold) {
    auto it = predicted.find(id);
    if (it == predicted.end()) continue;
    p.push_back(static_cast<std::uint32_t>(index_of(it->second)));
    t.push_back(static_cast<std::uint32_t>(index_of(g)));
  }
  if (t.empty()) throw SchemaError("truth labels share no post ids with the corpus");
  const auto names = class_names(task);
  return evaluate(p, t, names, other_class(task));
}

json class_distribution(const LabelSet& labels) {
  std::map<std::string, std::size_t> products, replies;
  for (auto c : kAllProductCategories) products[std::string(to_string(c))] = 0;
  for (auto r : kAllReplyLabels) replies[std::string(to_string(r))] = 0;
  for (const auto& [id, c] : labels.products) ++products[std::string(to_string(c))];
  for (const auto& [id, r] : labels.replies) ++replies[std::string(to_string(r))];
  return {{"products", products}, {"replies", replies}};
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
  PipelineResult result;
  const fs::path out_dir(config.output_dir);
  std::map<std::string, std::string> contents;

  auto ingested = stage("ingest", [&] {
    SchemaConfig schema = config.schema ? SchemaConfig::load(*config.schema) : SchemaConfig{};
    return config.corpus_format == "csv" ? ingest_csv(config.corpus, schema)
                                         : ingest_jsonl(config.corpus, schema);
  });
  const Corpus& corpus = ingested.corpus;
  result.stats = corpus_stats(corpus);

  auto [product_model, reply_model] = stage("load_models", [&] {
    return std::pair{TaskModel::load(config.product_model), TaskModel::load(config.reply_model)};
  });

  auto predicted = stage("classify", [&] {
    QuoteConfig quotes;
    quotes.min_quote_chars = config.min_quote_chars;
    const auto clean = clean_corpus_text(corpus, quotes);
    return predict_labels(corpus, product_model, reply_model, clean);
  });

  json metrics = {{"format", "chainforge.metrics"},
                  {"version", 1},
                  {"predicted_distribution", class_distribution(predicted)}};
  std::optional<GroundTruth> planted_truth;
  stage("evaluate", [&] {
    if (!config.truth) return;
    std::ifstream in(*config.truth);
    if (!in) throw IoError("cannot open truth file: " + *config.truth);
    const json tj = json::parse(in);
    const LabelSet gold = LabelSet::from_json(tj);
    if (!gold.products.empty()) {
      auto m = score<ProductCategory>(predicted.products, gold.products, Task::product);
      metrics["product"] = m.to_json();
      contents["product_confusion.csv"] = m.confusion_csv();
    }
    if (!gold.replies.empty()) {
      auto m = score<ReplyLabel>(predicted.replies, gold.replies, Task::reply);
      metrics["reply"] = m.to_json();
      contents["reply_confusion.csv"] = m.confusion_csv();
    }
    if (tj.value("format", "") == "chainforge.truth") planted_truth = GroundTruth::from_json(tj);
  });

  auto graph = stage("graph", [&] { return build_graph(corpus, predicted, config.graph_mode); });
  result.edges = graph.edges().size();

  auto [links, sgraph] = stage("chains", [&] {
    LinkOptions opts;
    opts.traversal = config.traversal;
    if (config.max_gap_days) {
      opts.max_gap_seconds = static_cast<std::int64_t>(*config.max_gap_days * 86400.0);
    }
    auto found = attenuate(find_links(graph, opts).links);
    auto agg = aggregate(found);
    return std::pair{std::move(found), std::move(agg)};
  });
  result.links = links.size();
  result.middle_users = weight_per_middle_user(links).size();

  if (planted_truth) {
    stage("evaluate", [&] {
      const auto rec = planted_recovery(links, *planted_truth);
      const auto report = relevance_report(links, label_links_from_truth(links, *planted_truth),
                                           config.graph_mode == GraphMode::filtered
                                               ? ReportMode::algorithm_output
                                               : ReportMode::sample_baseline);
      metrics["planted"] = {{"planted", rec.planted},
                            {"recovered", rec.recovered},
                            {"found", rec.found},
                            {"found_matching", rec.found_matching},
                            {"recall", rec.recall()},
                            {"precision", rec.precision()}};
      metrics["relevance"] = report.to_json();
    });
  }
  result.metrics = metrics;

  stage("report", [&] {
    std::ostringstream edges_out, links_out;
    write_edges_jsonl(graph, edges_out);
    write_links_jsonl(links, config.traversal, links_out);

    CategoryPredicate filter;
    if (!config.alluvial_filter.empty()) {
      std::set<ProductCategory> keep;
      for (const auto& n : config.alluvial_filter) keep.insert(*parse_product_category(n));
      filter = [keep](ProductCategory c) { return keep.contains(c); };
    }

    json stats = {{"format", "chainforge.stats"},
                  {"version", 1},
                  {"forum", corpus.forum_name()},
                  {"corpus", to_json(result.stats)},
                  {"ingest", ingest_json(ingested.report)},
                  {"graph", to_json(summarize(graph))},
                  {"graph_mode", to_string(graph.mode())},
                  {"graph_counters", counters_json(graph.counters)},
                  {"links", result.links},
                  {"middle_users", result.middle_users}};

    contents["stats.json"] = stats.dump(2) + "\n";
    contents["metrics.json"] = metrics.dump(2) + "\n";
    contents["edges.jsonl"] = edges_out.str();
    contents["links.jsonl"] = links_out.str();
    contents["supply_graph.json"] = sgraph.to_json().dump(2) + "\n";
    contents["alluvial.json"] = export_alluvial(sgraph, filter).to_json().dump(2) + "\n";
    contents["trends.csv"] = trend_series(corpus, predicted).to_csv();

    fs::create_directories(out_dir);
    for (const auto& [name, body] : contents) {
      write_text(out_dir / name, body);
      result.artifacts[name] = text::hex64(text::fnv1a(read_bytes(out_dir / name)));
    }

    auto cfg = config.to_json();
    cfg.erase("output_dir");
    json manifest = {{"format", "chainforge.manifest"},
                     {"version", 1},
                     {"library_version", CHAINFORGE_VERSION},
                     {"config", cfg},
                     {"config_hash", config.hash()},
                     {"models",
                      {{"product",
                        {{"feature_fingerprint", text::hex64(product_model.features.fingerprint())},
                         {"train_seed", product_model.classifier.config.seed}}},
                       {"reply",
                        {{"feature_fingerprint", text::hex64(reply_model.features.fingerprint())},
                         {"train_seed", reply_model.classifier.config.seed}}}}},
                     {"artifacts", result.artifacts}};
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
  });
  return result;
}

}  // namespace chainforge
