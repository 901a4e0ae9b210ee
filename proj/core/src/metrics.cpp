#include "chainforge/metrics.hpp"

#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chainforge/error.hpp"

namespace chainforge {

using nlohmann::json;

MetricsReport evaluate(std::span<const std::uint32_t> predictions,
                       std::span<const std::uint32_t> truth,
                       std::span<const std::string> class_names,
                       std::optional<std::uint32_t> excluded_class) {
  if (predictions.size() != truth.size()) {
    throw InvalidArgument("predictions and truth differ in length");
  }
  if (truth.empty()) throw InvalidArgument("cannot evaluate an empty prediction set");
  const auto n = class_names.size();
  MetricsReport r;
  r.confusion.assign(n, std::vector<std::size_t>(n, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= n || predictions[i] >= n) throw InvalidArgument("label out of range");
    ++r.confusion[truth[i]][predictions[i]];
  }

  std::size_t correct = 0;
  double non_other_support = 0.0;
  double non_other_precision = 0.0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t tp = r.confusion[c][c];
    std::size_t support = 0, predicted = 0;
    for (std::size_t k = 0; k < n; ++k) {
      support += r.confusion[c][k];
      predicted += r.confusion[k][c];
    }
    correct += tp;
    ClassScores s;
    s.name = class_names[c];
    s.support = support;
    s.precision = predicted == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(predicted);
    s.recall = support == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(support);
    s.f1 = (s.precision + s.recall) == 0.0 ? 0.0
                                           : 2.0 * s.precision * s.recall / (s.precision + s.recall);
    const auto w = static_cast<double>(support);
    r.weighted_precision += w * s.precision;
    r.weighted_recall += w * s.recall;
    r.weighted_f1 += w * s.f1;
    if (support > 0) {
      r.macro_f1 += s.f1;
      ++present;
    }
    if (!excluded_class || *excluded_class != c) {
      non_other_support += w;
      non_other_precision += w * s.precision;
    }
    r.per_class.push_back(std::move(s));
  }
  const auto total = static_cast<double>(truth.size());
  r.weighted_precision /= total;
  r.weighted_recall /= total;
  r.weighted_f1 /= total;
  r.macro_f1 = present == 0 ? 0.0 : r.macro_f1 / static_cast<double>(present);
  r.accuracy = static_cast<double>(correct) / total;
  r.weighted_non_other_precision =
      non_other_support == 0.0 ? 0.0 : non_other_precision / non_other_support;
  return r;
}

json MetricsReport::to_json() const {
  json classes = json::array();
  for (const auto& c : per_class) {
    classes.push_back({{"name", c.name},
                       {"precision", c.precision},
                       {"recall", c.recall},
                       {"f1", c.f1},
                       {"support", c.support}});
  }
  return {{"per_class", classes},
          {"weighted_precision", weighted_precision},
          {"weighted_recall", weighted_recall},
          {"weighted_f1", weighted_f1},
          {"macro_f1", macro_f1},
          {"accuracy", accuracy},
          {"weighted_non_other_precision", weighted_non_other_precision},
          {"confusion", confusion}};
}

std::string MetricsReport::to_table() const {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-20s %9s %9s %9s %9s\n", "class", "precision", "recall", "f1",
                "support");
  out << buf;
  for (const auto& c : per_class) {
    std::snprintf(buf, sizeof buf, "%-20s %9.3f %9.3f %9.3f %9zu\n", c.name.c_str(), c.precision,
                  c.recall, c.f1, c.support);
    out << buf;
  }
  std::size_t total = 0;
  for (const auto& c : per_class) total += c.support;
  std::snprintf(buf, sizeof buf, "%-20s %9.3f %9.3f %9.3f %9zu\n", "weighted avg",
                weighted_precision, weighted_recall, weighted_f1, total);
  out << buf;
  std::snprintf(buf, sizeof buf, "%-20s %9.3f\n", "non-other precision",
                weighted_non_other_precision);
  out << buf;
  std::snprintf(buf, sizeof buf, "%-20s %9.3f\n", "accuracy", accuracy);
  out << buf;
  return out.str();
}

std::string MetricsReport::confusion_csv() const {
  std::ostringstream out;
  out << "truth";
  for (const auto& c : per_class) out << ',' << c.name;
  out << '\n';
  for (std::size_t i = 0; i < confusion.size(); ++i) {
    out << per_class[i].name;
    for (auto v : confusion[i]) out << ',' << v;
    out << '\n';
  }
  return out.str();
}

}  // namespace chainforge
