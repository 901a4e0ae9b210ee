#include "chainforge/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "chainforge/error.hpp"
#include "chainforge/rng.hpp"
#include "chainforge/text.hpp"

namespace chainforge {

using nlohmann::json;

namespace {

// Softmax of `scores` in place; returns log-sum-exp.
double softmax_inplace(std::vector<double>& scores) {
  const double max = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double& s : scores) {
    s = std::exp(s - max);
    sum += s;
  }
  for (double& s : scores) s /= sum;
  return max + std::log(sum);
}

void check_data(std::span<const LabeledExample> data, std::size_t n_classes) {
  if (data.empty()) throw InvalidArgument("training data is empty");
  const auto dim = data.front().features.dimension();
  for (const auto& ex : data) {
    if (ex.features.dimension() != dim) {
      throw InvalidArgument("examples do not share one feature dimension");
    }
    if (ex.label >= n_classes) {
      throw InvalidArgument("label " + std::to_string(ex.label) + " out of range for " +
                            std::to_string(n_classes) + " classes");
    }
  }
}

// Linear scores with an optional scale on the weight matrix.
void scores_into(std::span<const double> weights, double scale, std::span<const double> bias,
                 std::size_t n_features, const SparseVector& x, std::vector<double>& out) {
  const auto n_classes = bias.size();
  out.assign(n_classes, 0.0);
  const auto idx = x.indices();
  const auto val = x.values();
  for (std::size_t c = 0; c < n_classes; ++c) {
    const double* row = weights.data() + c * n_features;
    double s = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) s += row[idx[k]] * val[k];
    out[c] = scale * s + bias[c];
  }
}

// Turns probabilities into the per-class data-gradient coefficients
// w * (p_c - [c == label]) and returns the weighted cross-entropy term.
double cross_entropy_coefficients(std::vector<double>& scores, std::uint32_t label,
                                  double weight) {
  const double z_label = scores[label];
  const double lse = softmax_inplace(scores);
  for (std::size_t c = 0; c < scores.size(); ++c) {
    scores[c] = weight * (scores[c] - (c == label ? 1.0 : 0.0));
  }
  return weight * (lse - z_label);
}

}  // namespace

void TrainConfig::validate() const {
  if (!(l2_lambda >= 0.0)) throw InvalidArgument("l2_lambda must be >= 0");
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be > 0");
  if (!(lr_decay >= 0.0)) throw InvalidArgument("lr_decay must be >= 0");
  if (epochs < 1) throw InvalidArgument("epochs must be >= 1");
  if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  if (learning_rate * l2_lambda >= 1.0) {
    throw InvalidArgument("learning_rate * l2_lambda must be < 1");
  }
}

json TrainConfig::to_json() const {
  return {{"l2_lambda", l2_lambda},
          {"learning_rate", learning_rate},
          {"lr_decay", lr_decay},
          {"epochs", epochs},
          {"batch_size", batch_size},
          {"seed", seed},
          {"class_weighting", class_weighting == ClassWeighting::balanced ? "balanced" : "none"}};
}

TrainConfig TrainConfig::from_json(const json& j) {
  TrainConfig c;
  c.l2_lambda = j.value("l2_lambda", c.l2_lambda);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.lr_decay = j.value("lr_decay", c.lr_decay);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.seed = j.value("seed", c.seed);
  const auto w = j.value("class_weighting", std::string("none"));
  if (w == "balanced") {
    c.class_weighting = ClassWeighting::balanced;
  } else if (w == "none") {
    c.class_weighting = ClassWeighting::none;
  } else {
    throw SchemaError("unknown class_weighting '" + w + "'");
  }
  c.validate();
  return c;
}

LinearModel LinearModel::zeros(std::vector<std::string> class_names, std::size_t n_features) {
  LinearModel m;
  m.n_features = n_features;
  m.weights.assign(class_names.size() * n_features, 0.0);
  m.bias.assign(class_names.size(), 0.0);
  m.class_names = std::move(class_names);
  return m;
}

json LinearModel::to_json() const {
  return {{"format", "chainforge.linear"},
          {"version", kFormatVersion},
          {"engine", "logistic_regression"},
          {"class_names", class_names},
          {"n_features", n_features},
          {"feature_fingerprint", text::hex64(feature_fingerprint)},
          {"train_config", config.to_json()},
          {"final_loss", final_loss},
          {"loss_history", loss_history},
          {"bias", bias},
          {"weights", weights}};
}

LinearModel LinearModel::from_json(const json& j) {
  if (j.value("format", "") != "chainforge.linear") throw SchemaError("not a linear model");
  const int version = j.at("version").get<int>();
  if (version != kFormatVersion) {
    throw SchemaError("linear model version " + std::to_string(version) + " unsupported (expected " +
                      std::to_string(kFormatVersion) + ")");
  }
  LinearModel m;
  m.class_names = j.at("class_names").get<std::vector<std::string>>();
  m.n_features = j.at("n_features").get<std::size_t>();
  m.feature_fingerprint = std::stoull(j.at("feature_fingerprint").get<std::string>(), nullptr, 16);
  m.config = TrainConfig::from_json(j.at("train_config"));
  m.final_loss = j.at("final_loss").get<double>();
  m.loss_history = j.at("loss_history").get<std::vector<double>>();
  m.bias = j.at("bias").get<std::vector<double>>();
  m.weights = j.at("weights").get<std::vector<double>>();
  if (m.class_names.size() < 2) throw SchemaError("linear model needs at least two classes");
  if (m.bias.size() != m.class_names.size() ||
      m.weights.size() != m.class_names.size() * m.n_features) {
    throw SchemaError("linear model: parameter shapes do not match class/feature counts");
  }
  return m;
}

std::vector<double> class_weights(std::span<const LabeledExample> data, std::size_t n_classes,
                                  ClassWeighting weighting) {
  std::vector<double> w(n_classes, 1.0);
  if (weighting == ClassWeighting::none) return w;
  std::vector<std::size_t> counts(n_classes, 0);
  for (const auto& ex : data) ++counts[ex.label];
  const auto present = static_cast<double>(
      std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }));
  for (std::size_t c = 0; c < n_classes; ++c) {
    w[c] = counts[c] == 0 ? 0.0
                          : static_cast<double>(data.size()) / (present * static_cast<double>(counts[c]));
  }
  return w;
}

ObjectiveValue objective(const LinearModel& model, std::span<const LabeledExample> data,
                         double l2_lambda, ClassWeighting weighting) {
  const auto n_classes = model.n_classes();
  check_data(data, n_classes);
  const auto cw = class_weights(data, n_classes, weighting);
  ObjectiveValue out;
  out.weight_gradient.assign(model.weights.size(), 0.0);
  out.bias_gradient.assign(n_classes, 0.0);
  double total_weight = 0.0;
  double data_loss = 0.0;
  std::vector<double> coeff;
  for (const auto& ex : data) {
    if (ex.features.dimension() != model.n_features) {
      throw InvalidArgument("feature dimension does not match model");
    }
    const double w = cw[ex.label];
    total_weight += w;
    scores_into(model.weights, 1.0, model.bias, model.n_features, ex.features, coeff);
    data_loss += cross_entropy_coefficients(coeff, ex.label, w);
    const auto idx = ex.features.indices();
    const auto val = ex.features.values();
    for (std::size_t c = 0; c < n_classes; ++c) {
      out.bias_gradient[c] += coeff[c];
      double* g = out.weight_gradient.data() + c * model.n_features;
      for (std::size_t k = 0; k < idx.size(); ++k) g[idx[k]] += coeff[c] * val[k];
    }
  }
  for (auto& g : out.weight_gradient) g /= total_weight;
  for (auto& g : out.bias_gradient) g /= total_weight;
  double sq = 0.0;
  for (std::size_t i = 0; i < model.weights.size(); ++i) {
    sq += model.weights[i] * model.weights[i];
    out.weight_gradient[i] += l2_lambda * model.weights[i];
  }
  out.loss = data_loss / total_weight + 0.5 * l2_lambda * sq;
  return out;
}

LinearModel train(std::span<const LabeledExample> data, std::vector<std::string> class_names,
                  const TrainConfig& config, std::uint64_t feature_fingerprint) {
  config.validate();
  const auto n_classes = class_names.size();
  if (n_classes < 2) throw InvalidArgument("at least two class names are required");
  check_data(data, n_classes);
  {
    std::vector<bool> present(n_classes, false);
    for (const auto& ex : data) present[ex.label] = true;
    if (std::count(present.begin(), present.end(), true) < 2) {
      throw InvalidArgument("training data contains a single class");
    }
  }

  const auto n_features = data.front().features.dimension();
  LinearModel model = LinearModel::zeros(std::move(class_names), n_features);
  model.config = config;
  model.feature_fingerprint = feature_fingerprint;
  const auto cw = class_weights(data, n_classes, config.class_weighting);

  // Weights are kept as scale * v so the L2 shrink is O(1) per batch.
  std::vector<double>& v = model.weights;
  double scale = 1.0;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(config.seed);
  std::vector<std::vector<double>> batch_coeff;
  std::vector<double> bias_step(n_classes);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = config.learning_rate / (1.0 + config.lr_decay * epoch);
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const auto end = std::min(order.size(), start + config.batch_size);
      batch_coeff.resize(end - start);
      double batch_weight = 0.0;
      for (std::size_t b = start; b < end; ++b) {
        const auto& ex = data[order[b]];
        const double w = cw[ex.label];
        batch_weight += w;
        auto& coeff = batch_coeff[b - start];
        scores_into(v, scale, model.bias, n_features, ex.features, coeff);
        cross_entropy_coefficients(coeff, ex.label, w);
      }
      if (batch_weight == 0.0) continue;

      scale *= 1.0 - lr * config.l2_lambda;
      const double step = lr / (batch_weight * scale);
      std::fill(bias_step.begin(), bias_step.end(), 0.0);
      for (std::size_t b = start; b < end; ++b) {
        const auto& ex = data[order[b]];
        const auto& coeff = batch_coeff[b - start];
        const auto idx = ex.features.indices();
        const auto val = ex.features.values();
        for (std::size_t c = 0; c < n_classes; ++c) {
          bias_step[c] += coeff[c];
          if (coeff[c] == 0.0) continue;
          double* row = v.data() + c * n_features;
          const double k = step * coeff[c];
          for (std::size_t t = 0; t < idx.size(); ++t) row[idx[t]] -= k * val[t];
        }
      }
      for (std::size_t c = 0; c < n_classes; ++c) model.bias[c] -= lr * bias_step[c] / batch_weight;
      if (scale < 1e-6) {
        for (double& x : v) x *= scale;
        scale = 1.0;
      }
    }
    if (scale != 1.0) {
      for (double& x : v) x *= scale;
      scale = 1.0;
    }
    const double loss = objective(model, data, config.l2_lambda, config.class_weighting).loss;
    if (!std::isfinite(loss)) {
      throw DivergedError(epoch + 1, "training diverged at epoch " + std::to_string(epoch + 1) +
                                         " (non-finite loss)");
    }
    model.loss_history.push_back(loss);
  }
  model.final_loss = model.loss_history.back();
  return model;
}

std::vector<double> predict_proba(const LinearModel& model, const SparseVector& x) {
  if (x.dimension() != model.n_features) {
    throw InvalidArgument("feature dimension " + std::to_string(x.dimension()) +
                          " does not match model dimension " + std::to_string(model.n_features));
  }
  std::vector<double> scores;
  scores_into(model.weights, 1.0, model.bias, model.n_features, x, scores);
  softmax_inplace(scores);
  return scores;
}

std::uint32_t predict(const LinearModel& model, const SparseVector& x) {
  const auto p = predict_proba(model, x);
  return static_cast<std::uint32_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

std::uint32_t Classifier::predict(const SparseVector& x) const {
  const auto p = predict_proba(x);
  return static_cast<std::uint32_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

void LogisticRegression::fit(std::span<const LabeledExample> data,
                             std::vector<std::string> class_names) {
  model_ = train(data, std::move(class_names), config_, fingerprint_);
}

std::vector<double> LogisticRegression::predict_proba(const SparseVector& x) const {
  return chainforge::predict_proba(model_, x);
}

std::uint32_t LogisticRegression::predict(const SparseVector& x) const {
  return chainforge::predict(model_, x);
}

}  // namespace chainforge
