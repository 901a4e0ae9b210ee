#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace chainforge {

struct ClassScores {
  std::string name;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct MetricsReport {
  std::vector<ClassScores> per_class;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  /// Support-weighted precision over every class except the excluded one
  /// (`other`); equals weighted_precision when nothing is excluded.
  double weighted_non_other_precision = 0.0;
  /// confusion[truth][prediction]
  std::vector<std::vector<std::size_t>> confusion;

  nlohmann::json to_json() const;
  std::string to_table() const;
  /// Header row of predicted class names, one row per true class.
  std::string confusion_csv() const;
};

/// Precision, recall and F1 per class (0 when a denominator is 0), their
/// support-weighted averages and the confusion matrix. `excluded_class` is
/// left out of weighted_non_other_precision. Throws InvalidArgument on empty
/// or mismatched inputs or out-of-range labels.
MetricsReport evaluate(std::span<const std::uint32_t> predictions,
                       std::span<const std::uint32_t> truth,
                       std::span<const std::string> class_names,
                       std::optional<std::uint32_t> excluded_class = std::nullopt);

}  // namespace chainforge
