#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "chainforge/chains.hpp"
#include "chainforge/classify.hpp"
#include "chainforge/corpus.hpp"
#include "chainforge/error.hpp"
#include "chainforge/featurize.hpp"
#include "chainforge/graph.hpp"
#include "chainforge/label_set.hpp"
#include "chainforge/sampling.hpp"

namespace chainforge {

enum class Task { product, reply };

std::string_view to_string(Task t) noexcept;
Task parse_task(std::string_view s);
std::vector<std::string> class_names(Task t);
/// Label index of `other` for the task.
std::uint32_t other_class(Task t) noexcept;

/// Featurizer and classifier saved together so they cannot drift apart.
struct TaskModel {
  static constexpr int kFormatVersion = 1;

  Task task = Task::product;
  TfidfModel features;
  LinearModel classifier;

  std::uint32_t predict(std::string_view text) const;

  nlohmann::json to_json() const;
  /// Throws SchemaError when the classifier was trained on vectors from a
  /// different featurizer.
  static TaskModel from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static TaskModel load(const std::string& path);
};

/// Texts and label indices for one task, built from a corpus and labels.
/// Product documents are whitespace-collapsed product posts; reply documents
/// are quote-stripped replies. Posts without a label are left out.
struct TaskDataset {
  Task task = Task::product;
  std::vector<PostId> posts;
  std::vector<std::string> docs;
  std::vector<std::uint32_t> labels;

  std::size_t size() const noexcept { return docs.size(); }
};

TaskDataset build_dataset(Task task, const Corpus& corpus, const LabelSet& labels,
                          const std::map<PostId, std::string>& clean_text);

struct ModelTrainOptions {
  NgramParams ngrams;
  TrainConfig train;
  /// Optional shrink of the `other` class before fitting ("below:<class>"
  /// or an absolute count).
  std::optional<std::string> undersample_other;
  std::uint64_t undersample_seed = 1;
};

/// Fits the featurizer on the (possibly undersampled) training documents,
/// then the classifier.
TaskModel train_task_model(const TaskDataset& data, const ModelTrainOptions& options);

/// Featurizes every document with the model's own featurizer.
std::vector<LabeledExample> featurize_dataset(const TaskDataset& data, const TfidfModel& features);

/// Predicted labels for every post of the corpus.
LabelSet predict_labels(const Corpus& corpus, const TaskModel& product_model,
                        const TaskModel& reply_model,
                        const std::map<PostId, std::string>& clean_text);

/// A failure inside run_pipeline, tagged with the stage that failed.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& cause)
      : Error("stage '" + stage + "' failed: " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct PipelineConfig {
  std::string corpus;
  /// "jsonl" or "csv".
  std::string corpus_format = "jsonl";
  std::optional<std::string> schema;
  std::string product_model;
  std::string reply_model;
  std::string output_dir;
  GraphMode graph_mode = GraphMode::filtered;
  Traversal traversal = Traversal::exhaustive;
  std::optional<double> max_gap_days;
  std::size_t min_quote_chars = 40;
  /// Optional gold labels; when set, metrics.json scores both classifiers
  /// and confusion CSVs are written. A generator truth file also yields
  /// planted-link recovery.
  std::optional<std::string> truth;
  /// Optional category names; alluvial flows touching none of them are dropped.
  std::vector<std::string> alluvial_filter;

  static PipelineConfig from_json(const nlohmann::json& j);
  static PipelineConfig load(const std::string& path);
  nlohmann::json to_json() const;
  /// Hash of the config without output_dir, so relocated reruns match.
  std::string hash() const;
};

struct PipelineResult {
  ForumStats stats;
  std::size_t edges = 0;
  std::size_t links = 0;
  std::size_t middle_users = 0;
  /// Artifact file name -> FNV-1a hash of its bytes, sorted by name.
  std::map<std::string, std::string> artifacts;
  nlohmann::json metrics;
};

/// ingest -> featurize/classify -> graph -> chains -> report, writing
/// stats.json, metrics.json, edges.jsonl, links.jsonl, supply_graph.json,
/// alluvial.json, trends.csv and manifest.json into output_dir.
/// Any failure is rethrown as StageError.
PipelineResult run_pipeline(const PipelineConfig& config);

}  // namespace chainforge
