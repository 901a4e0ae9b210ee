#pragma once

#include <map>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "chainforge/corpus.hpp"
#include "chainforge/labels.hpp"

namespace chainforge {

/// Per-post labels for both classification tasks, either annotated by hand,
/// predicted by a model or emitted by the synthetic generator.
struct LabelSet {
  std::map<PostId, ProductCategory, std::less<>> products;
  std::map<PostId, ReplyLabel, std::less<>> replies;

  /// Reads {"products": {id: category}, "replies": {id: label}}; other
  /// top-level keys are ignored so a generator truth file loads directly.
  static LabelSet from_json(const nlohmann::json& j);
  static LabelSet load(const std::string& path);
  nlohmann::json to_json() const;
};

}  // namespace chainforge
