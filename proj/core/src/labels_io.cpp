#include <array>
#include <fstream>

#include <nlohmann/json.hpp>

#include "chainforge/error.hpp"
#include "chainforge/label_set.hpp"
#include "chainforge/labels.hpp"

namespace chainforge {
namespace {

constexpr std::array<std::string_view, kProductCategoryCount> kProductNames{
    "account",   "botnet",        "crypter", "ddos_service",       "hacked_server",
    "hack_for_hire", "hosting",   "malware", "proxy",              "social_booster",
    "spam_tool", "traffic",       "video_game_service",            "other"};

constexpr std::array<std::string_view, kReplyLabelCount> kReplyNames{"buy", "sell", "other"};

constexpr std::array<std::string_view, kLinkValidationLabelCount> kValidationNames{
    "related", "resell", "unrelated", "lack_of_product", "lack_of_purchase"};

std::string normalize_label(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  for (std::size_t i = b; i < e; ++i) {
    char c = s[i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    if (c == '-' || c == ' ') c = '_';
    out.push_back(c);
  }
  return out;
}

template <typename Enum, std::size_t N>
std::optional<Enum> parse_from(const std::array<std::string_view, N>& names,
                               std::string_view s) {
  const auto norm = normalize_label(s);
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == norm) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(ProductCategory c) noexcept { return kProductNames[index_of(c)]; }
std::string_view to_string(ReplyLabel r) noexcept { return kReplyNames[index_of(r)]; }
std::string_view to_string(LinkValidationLabel l) noexcept {
  return kValidationNames[index_of(l)];
}

std::optional<ProductCategory> parse_product_category(std::string_view s) {
  return parse_from<ProductCategory>(kProductNames, s);
}
std::optional<ReplyLabel> parse_reply_label(std::string_view s) {
  return parse_from<ReplyLabel>(kReplyNames, s);
}
std::optional<LinkValidationLabel> parse_link_validation_label(std::string_view s) {
  return parse_from<LinkValidationLabel>(kValidationNames, s);
}

LabelSet LabelSet::from_json(const nlohmann::json& j) {
  LabelSet out;
  if (!j.is_object()) throw SchemaError("label file: expected a JSON object");
  if (auto it = j.find("products"); it != j.end()) {
    for (const auto& [id, v] : it->items()) {
      auto c = parse_product_category(v.get<std::string>());
      if (!c) throw SchemaError("label file: unknown product category '" + v.get<std::string>() + "' for post " + id);
      out.products.emplace(id, *c);
    }
  }
  if (auto it = j.find("replies"); it != j.end()) {
    for (const auto& [id, v] : it->items()) {
      auto r = parse_reply_label(v.get<std::string>());
      if (!r) throw SchemaError("label file: unknown reply label '" + v.get<std::string>() + "' for post " + id);
      out.replies.emplace(id, *r);
    }
  }
  return out;
}

LabelSet LabelSet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open label file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("label file " + path + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::json LabelSet::to_json() const {
  nlohmann::json p = nlohmann::json::object();
  for (const auto& [id, c] : products) p[id] = to_string(c);
  nlohmann::json r = nlohmann::json::object();
  for (const auto& [id, l] : replies) r[id] = to_string(l);
  return {{"products", std::move(p)}, {"replies", std::move(r)}};
}

}  // namespace chainforge
