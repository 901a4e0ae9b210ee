#include <doctest.h>

#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "chainforge/classify.hpp"
#include "chainforge/error.hpp"
#include "chainforge/rng.hpp"
#include "gradient_oracle.hpp"
#include "test_support.hpp"

using namespace chainforge;
using testing::random_model;
using testing::random_problem;

namespace {

SparseVector dense_vec(std::vector<double> xs) {
  std::vector<std::pair<SparseVector::Index, double>> pairs;
  for (std::size_t i = 0; i < xs.size(); ++i) pairs.emplace_back(static_cast<SparseVector::Index>(i), xs[i]);
  return SparseVector::from_pairs(xs.size(), std::move(pairs));
}

}  // namespace

TEST_CASE("four separable points reach training accuracy 1") {
  const std::vector<LabeledExample> data{
      {dense_vec({1.0, 0.1}), 0, "a"},
      {dense_vec({0.9, -0.2}), 0, "b"},
      {dense_vec({-1.0, 0.2}), 1, "c"},
      {dense_vec({-0.8, -0.1}), 1, "d"},
  };
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 2;
  const auto m = train(data, {"left", "right"}, cfg);
  for (const auto& ex : data) CHECK(predict(m, ex.features) == ex.label);
  CHECK(m.loss_history.size() == 200);
  CHECK(m.final_loss == m.loss_history.back());
}

TEST_CASE("identical feature distributions give probabilities near one half") {
  std::vector<LabeledExample> data;
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    auto x = dense_vec({rng.uniform(), rng.uniform(), rng.uniform()});
    data.push_back({x, 0, ""});
    data.push_back({x, 1, ""});
  }
  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.batch_size = 64;
  const auto m = train(data, {"a", "b"}, cfg);
  for (int i = 0; i < 20; ++i) {
    const auto p = predict_proba(m, dense_vec({rng.uniform(), rng.uniform(), rng.uniform()}));
    CHECK(std::abs(p[0] - 0.5) <= 0.05);
  }
}

TEST_CASE("zero model predicts uniform, ties go to the lowest index") {
  const auto m = LinearModel::zeros({"a", "b", "c", "d"}, 3);
  const auto p = predict_proba(m, dense_vec({1, 2, 3}));
  for (double x : p) CHECK(x == doctest::Approx(0.25));
  CHECK(predict(m, dense_vec({1, 2, 3})) == 0);
}

TEST_CASE("a +10 logit margin saturates the softmax") {
  auto m = LinearModel::zeros({"a", "b", "c"}, 2);
  m.bias[2] = 10.0;
  CHECK(predict_proba(m, SparseVector(2))[2] > 0.99);
}

TEST_CASE("predict_proba equals a dense softmax") {
  Rng rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t classes = 2 + rng.below(5), dim = 1 + rng.below(8);
    const auto m = random_model(rng, classes, dim);
    const auto x = random_problem(rng, 1, dim, 2).front().features;
    const auto dense = x.to_dense();
    std::vector<double> z(classes);
    for (std::size_t c = 0; c < classes; ++c) {
      z[c] = m.bias[c];
      for (std::size_t f = 0; f < dim; ++f) z[c] += m.weights[c * dim + f] * dense[f];
    }
    double norm = 0.0;
    for (double s : z) norm += std::exp(s);
    const auto p = predict_proba(m, x);
    double total = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      CHECK(std::abs(p[c] - std::exp(z[c]) / norm) < 1e-9);
      total += p[c];
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
  }
}

TEST_CASE("analytic gradient matches central differences") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const auto data = random_problem(rng, 20, 10, 3);
    auto m = random_model(rng, 3, 10);
    const double lambda = 0.01 * static_cast<double>(rng.below(10));
    const auto weighting = trial % 2 ? ClassWeighting::balanced : ClassWeighting::none;
    CHECK(testing::gradient_relative_error(m, data, lambda, weighting) < 1e-4);
  }
}

TEST_CASE("loss does not increase at a small fixed learning rate") {
  Rng rng(5);
  const auto data = random_problem(rng, 60, 6, 3);
  TrainConfig cfg;
  cfg.learning_rate = 1e-3;
  cfg.lr_decay = 0.0;
  cfg.epochs = 40;
  cfg.batch_size = data.size();
  const auto m = train(data, {"a", "b", "c"}, cfg);
  for (std::size_t i = 1; i < m.loss_history.size(); ++i) {
    CHECK(m.loss_history[i] <= m.loss_history[i - 1] + 1e-12);
  }
}

TEST_CASE("training is deterministic for a seed") {
  Rng rng(8);
  const auto data = random_problem(rng, 50, 5, 3);
  TrainConfig cfg;
  cfg.batch_size = 7;
  const auto a = train(data, {"a", "b", "c"}, cfg);
  const auto b = train(data, {"a", "b", "c"}, cfg);
  CHECK(a.weights == b.weights);
  cfg.seed = 2;
  const auto c = train(data, {"a", "b", "c"}, cfg);
  CHECK(a.weights != c.weights);
}

TEST_CASE("training errors") {
  const std::vector<LabeledExample> one_class{{dense_vec({1.0}), 0, ""}, {dense_vec({2.0}), 0, ""}};
  CHECK_THROWS_AS(train(one_class, {"a", "b"}, TrainConfig{}), InvalidArgument);
  CHECK_THROWS_AS(train({}, {"a", "b"}, TrainConfig{}), InvalidArgument);

  const std::vector<LabeledExample> huge{{dense_vec({1e300}), 0, ""}, {dense_vec({-1e300}), 1, ""}};
  try {
    train(huge, {"a", "b"}, TrainConfig{});
    FAIL("expected divergence");
  } catch (const DivergedError& e) {
    CHECK(e.epoch() == 1);
    CHECK(std::string(e.what()).find("diverged at epoch 1") != std::string::npos);
  }

  TrainConfig bad;
  bad.epochs = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  const auto m = LinearModel::zeros({"a", "b"}, 3);
  CHECK_THROWS_AS(predict_proba(m, SparseVector(4)), InvalidArgument);
}

TEST_CASE("balanced weights are N / (K * count)") {
  std::vector<LabeledExample> data;
  for (int i = 0; i < 6; ++i) data.push_back({SparseVector(1), 0, ""});
  for (int i = 0; i < 2; ++i) data.push_back({SparseVector(1), 2, ""});
  const auto w = class_weights(data, 3, ClassWeighting::balanced);
  CHECK(w[0] == doctest::Approx(8.0 / (2 * 6)));
  CHECK(w[2] == doctest::Approx(8.0 / (2 * 2)));
  const auto none = class_weights(data, 3, ClassWeighting::none);
  CHECK(none == std::vector<double>{1.0, 1.0, 1.0});
}

TEST_CASE("model save, load, predict is bit-identical") {
  Rng rng(21);
  const auto data = random_problem(rng, 40, 6, 3);
  TrainConfig cfg;
  cfg.class_weighting = ClassWeighting::balanced;
  const auto m = train(data, {"a", "b", "c"}, cfg, 0xfeedULL);
  const auto back = LinearModel::from_json(nlohmann::json::parse(m.to_json().dump()));
  CHECK(back.weights == m.weights);
  CHECK(back.bias == m.bias);
  CHECK(back.config == m.config);
  CHECK(back.feature_fingerprint == 0xfeedULL);
  for (const auto& ex : data) CHECK(predict_proba(back, ex.features) == predict_proba(m, ex.features));
}

TEST_CASE("classifier interface wraps logistic regression") {
  Rng rng(4);
  const auto data = random_problem(rng, 30, 4, 2);
  LogisticRegression lr;
  std::unique_ptr<Classifier> clf = std::make_unique<LogisticRegression>();
  clf->fit(data, {"a", "b"});
  CHECK(clf->name() == "logistic_regression");
  const auto p = clf->predict_proba(data[0].features);
  CHECK(p.size() == 2);
  CHECK(clf->predict(data[0].features) < 2);
}
