#include "chainforge/evaluation.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "chainforge/error.hpp"

namespace chainforge {

using nlohmann::json;

namespace {

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd m;
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.stddev = std::sqrt(ss / static_cast<double>(xs.size()));
  return m;
}

json mean_std_json(const MeanStd& m) { return {{"mean", m.mean}, {"std", m.stddev}}; }

std::vector<std::uint32_t> labels_of(std::span<const LabeledExample> data) {
  std::vector<std::uint32_t> out;
  out.reserve(data.size());
  for (const auto& ex : data) out.push_back(ex.label);
  return out;
}

std::vector<LabeledExample> gather(std::span<const LabeledExample> data,
                                   std::span<const std::size_t> idx) {
  std::vector<LabeledExample> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(data[i]);
  return out;
}

std::vector<std::size_t> apply_undersample(const std::vector<std::uint32_t>& labels,
                                           std::vector<std::size_t> train,
                                           const std::optional<UndersampleRule>& rule,
                                           std::uint64_t seed,
                                           std::vector<std::string>& warnings) {
  if (!rule) return train;
  std::vector<std::uint32_t> sub;
  sub.reserve(train.size());
  for (auto i : train) sub.push_back(labels[i]);
  auto r = undersample(sub, rule->shrink, rule->target, seed);
  warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
  std::vector<std::size_t> out;
  out.reserve(r.kept.size());
  for (auto k : r.kept) out.push_back(train[k]);
  return out;
}

}  // namespace

MetricsReport train_and_score(std::span<const LabeledExample> data,
                              std::span<const std::size_t> train,
                              std::span<const std::size_t> test,
                              std::span<const std::string> class_names,
                              const TrainConfig& config,
                              std::optional<std::uint32_t> excluded_class) {
  const auto train_set = gather(data, train);
  const auto model = chainforge::train(
      train_set, std::vector<std::string>(class_names.begin(), class_names.end()), config);
  std::vector<std::uint32_t> pred, truth;
  for (auto i : test) {
    pred.push_back(predict(model, data[i].features));
    truth.push_back(data[i].label);
  }
  return evaluate(pred, truth, class_names, excluded_class);
}

CrossValidationResult cross_validate(std::span<const LabeledExample> data,
                                     std::span<const std::string> class_names,
                                     const CrossValidationOptions& options) {
  const auto labels = labels_of(data);
  const auto folds = stratified_kfold(labels, options.k, options.seed);
  CrossValidationResult out;
  out.warnings = folds.warnings;
  std::vector<std::uint32_t> pooled_pred, pooled_truth;
  std::vector<double> wp, wr, wf, wn;
  for (std::size_t f = 0; f < folds.folds.size(); ++f) {
    const auto& test = folds.folds[f];
    if (test.empty()) continue;
    auto train = apply_undersample(labels, folds.training_indices(f), options.undersample,
                                   options.seed + f, out.warnings);
    const auto train_set = gather(data, train);
    const auto model = chainforge::train(
        train_set, std::vector<std::string>(class_names.begin(), class_names.end()),
        options.train);
    std::vector<std::uint32_t> pred, truth;
    for (auto i : test) {
      pred.push_back(predict(model, data[i].features));
      truth.push_back(labels[i]);
    }
    auto report = evaluate(pred, truth, class_names, options.excluded_class);
    wp.push_back(report.weighted_precision);
    wr.push_back(report.weighted_recall);
    wf.push_back(report.weighted_f1);
    wn.push_back(report.weighted_non_other_precision);
    pooled_pred.insert(pooled_pred.end(), pred.begin(), pred.end());
    pooled_truth.insert(pooled_truth.end(), truth.begin(), truth.end());
    out.folds.push_back(std::move(report));
  }
  out.pooled = evaluate(pooled_pred, pooled_truth, class_names, options.excluded_class);
  out.weighted_precision = mean_std(wp);
  out.weighted_recall = mean_std(wr);
  out.weighted_f1 = mean_std(wf);
  out.weighted_non_other_precision = mean_std(wn);
  return out;
}

json CrossValidationResult::to_json() const {
  json f = json::array();
  for (const auto& r : folds) f.push_back(r.to_json());
  return {{"folds", f},
          {"pooled", pooled.to_json()},
          {"weighted_precision", mean_std_json(weighted_precision)},
          {"weighted_recall", mean_std_json(weighted_recall)},
          {"weighted_f1", mean_std_json(weighted_f1)},
          {"weighted_non_other_precision", mean_std_json(weighted_non_other_precision)},
          {"warnings", warnings}};
}

LearningCurve learning_curve(std::span<const LabeledExample> data,
                             std::span<const std::string> class_names,
                             std::span<const std::size_t> sizes,
                             const CrossValidationOptions& options) {
  const auto labels = labels_of(data);
  const auto folds = stratified_kfold(labels, options.k, options.seed);
  LearningCurve out;
  out.warnings = folds.warnings;
  for (auto size : sizes) {
    if (size > data.size()) {
      throw InvalidArgument("learning-curve size " + std::to_string(size) +
                            " exceeds the available " + std::to_string(data.size()) + " examples");
    }
    if (size < class_names.size()) {
      out.warnings.push_back("size " + std::to_string(size) + " is below the class count " +
                             std::to_string(class_names.size()) + "; skipped");
      continue;
    }
    std::vector<double> f1, nonother;
    for (std::size_t f = 0; f < folds.folds.size(); ++f) {
      const auto& test = folds.folds[f];
      if (test.empty()) continue;
      auto train = apply_undersample(labels, folds.training_indices(f), options.undersample,
                                     options.seed + f, out.warnings);
      train = stratified_subsample(labels, train, size, options.seed ^ (0x9e3779b97f4a7c15ULL * (f + 1)));
      const auto report = train_and_score(data, train, test, class_names, options.train,
                                          options.excluded_class);
      f1.push_back(report.weighted_f1);
      nonother.push_back(report.weighted_non_other_precision);
    }
    out.points.push_back({size, f1.size(), mean_std(f1), mean_std(nonother)});
  }
  return out;
}

json LearningCurve::to_json() const {
  json pts = json::array();
  for (const auto& p : points) {
    pts.push_back({{"size", p.size},
                   {"folds", p.folds},
                   {"weighted_f1", mean_std_json(p.weighted_f1)},
                   {"weighted_non_other_precision", mean_std_json(p.weighted_non_other_precision)}});
  }
  return {{"points", pts}, {"warnings", warnings}};
}

}  // namespace chainforge
