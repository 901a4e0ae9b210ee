#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "chainforge/corpus.hpp"
#include "chainforge/sparse_vector.hpp"

namespace chainforge {

struct LabeledExample {
  SparseVector features;
  std::uint32_t label = 0;
  PostId source_post;
};

enum class ClassWeighting { none, balanced };

struct TrainConfig {
  double l2_lambda = 1e-4;
  double learning_rate = 0.5;
  /// Epoch e uses learning_rate / (1 + lr_decay * e).
  double lr_decay = 0.05;
  int epochs = 30;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
  ClassWeighting class_weighting = ClassWeighting::none;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Multinomial logistic regression parameters, row-major
/// (n_classes x n_features).
struct LinearModel {
  static constexpr int kFormatVersion = 1;

  std::vector<std::string> class_names;
  std::size_t n_features = 0;
  std::vector<double> weights;
  std::vector<double> bias;
  TrainConfig config;
  std::uint64_t feature_fingerprint = 0;
  double final_loss = 0.0;
  std::vector<double> loss_history;

  std::size_t n_classes() const noexcept { return class_names.size(); }
  std::span<const double> row(std::size_t c) const noexcept {
    return std::span<const double>(weights).subspan(c * n_features, n_features);
  }

  static LinearModel zeros(std::vector<std::string> class_names, std::size_t n_features);

  nlohmann::json to_json() const;
  static LinearModel from_json(const nlohmann::json& j);
};

/// Minimizes  sum_i w_i * CE_i / sum_i w_i  +  lambda/2 * ||W||^2  (bias is
/// not regularized) by shuffled mini-batch gradient descent. Deterministic
/// for a fixed config. Throws InvalidArgument when fewer than two classes
/// occur and DivergedError when the loss becomes non-finite.
LinearModel train(std::span<const LabeledExample> data, std::vector<std::string> class_names,
                  const TrainConfig& config, std::uint64_t feature_fingerprint = 0);

/// Softmax over linear scores. Throws InvalidArgument on dimension mismatch.
std::vector<double> predict_proba(const LinearModel& model, const SparseVector& x);

/// Argmax of predict_proba; ties go to the lowest class index.
std::uint32_t predict(const LinearModel& model, const SparseVector& x);

struct ObjectiveValue {
  double loss = 0.0;
  /// d loss / d weights (row-major like LinearModel::weights).
  std::vector<double> weight_gradient;
  std::vector<double> bias_gradient;
};

/// Full-batch regularized objective and its analytic gradient, using the same
/// per-example accumulation as the mini-batch trainer.
ObjectiveValue objective(const LinearModel& model, std::span<const LabeledExample> data,
                         double l2_lambda, ClassWeighting weighting = ClassWeighting::none);

/// Per-class example weights for `weighting` (all ones for `none`; for
/// `balanced`, N / (K_present * count_c)).
std::vector<double> class_weights(std::span<const LabeledExample> data, std::size_t n_classes,
                                  ClassWeighting weighting);

/// Pluggable training engine; the shipped engine is logistic regression.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual void fit(std::span<const LabeledExample> data, std::vector<std::string> class_names) = 0;
  virtual std::vector<double> predict_proba(const SparseVector& x) const = 0;
  virtual std::uint32_t predict(const SparseVector& x) const;
  virtual std::string name() const = 0;
};

class LogisticRegression final : public Classifier {
 public:
  explicit LogisticRegression(TrainConfig config = {}, std::uint64_t feature_fingerprint = 0)
      : config_(config), fingerprint_(feature_fingerprint) {}

  void fit(std::span<const LabeledExample> data, std::vector<std::string> class_names) override;
  std::vector<double> predict_proba(const SparseVector& x) const override;
  std::uint32_t predict(const SparseVector& x) const override;
  std::string name() const override { return "logistic_regression"; }

  const LinearModel& model() const noexcept { return model_; }

 private:
  TrainConfig config_;
  std::uint64_t fingerprint_;
  LinearModel model_;
};

}  // namespace chainforge
