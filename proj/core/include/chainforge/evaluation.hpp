#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "chainforge/classify.hpp"
#include "chainforge/metrics.hpp"
#include "chainforge/sampling.hpp"

namespace chainforge {

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Applied to each training fold only; test folds keep the natural
/// distribution.
struct UndersampleRule {
  std::uint32_t shrink;
  UndersampleTarget target;
};

struct CrossValidationOptions {
  std::size_t k = 5;
  std::uint64_t seed = 1;
  TrainConfig train;
  /// Class left out of weighted_non_other_precision (usually `other`).
  std::optional<std::uint32_t> excluded_class;
  std::optional<UndersampleRule> undersample;
};

struct CrossValidationResult {
  std::vector<MetricsReport> folds;
  /// Metrics over the concatenated out-of-fold predictions.
  MetricsReport pooled;
  MeanStd weighted_precision;
  MeanStd weighted_recall;
  MeanStd weighted_f1;
  MeanStd weighted_non_other_precision;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

CrossValidationResult cross_validate(std::span<const LabeledExample> data,
                                     std::span<const std::string> class_names,
                                     const CrossValidationOptions& options);

struct CurvePoint {
  std::size_t size = 0;
  std::size_t folds = 0;
  MeanStd weighted_f1;
  MeanStd weighted_non_other_precision;
};

struct LearningCurve {
  std::vector<CurvePoint> points;
  std::vector<std::string> warnings;
  nlohmann::json to_json() const;
};

/// For each size: per fold, train on a stratified subsample of that size
/// drawn from the other folds and score on the held-out fold. Sizes smaller
/// than the number of classes are skipped with a warning; a size at least as
/// large as a fold's training set uses all of it.
LearningCurve learning_curve(std::span<const LabeledExample> data,
                             std::span<const std::string> class_names,
                             std::span<const std::size_t> sizes,
                             const CrossValidationOptions& options);

/// Trains on `train` and scores on `test` (arbitrary split, e.g. by time).
MetricsReport train_and_score(std::span<const LabeledExample> data,
                              std::span<const std::size_t> train,
                              std::span<const std::size_t> test,
                              std::span<const std::string> class_names,
                              const TrainConfig& config,
                              std::optional<std::uint32_t> excluded_class = std::nullopt);

}  // namespace chainforge
