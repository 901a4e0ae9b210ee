#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace chainforge {

enum class ProductCategory : std::uint8_t {
  account,
  botnet,
  crypter,
  ddos_service,
  hacked_server,
  hack_for_hire,
  hosting,
  malware,
  proxy,
  social_booster,
  spam_tool,
  traffic,
  video_game_service,
  other,
};

inline constexpr std::size_t kProductCategoryCount = 14;

enum class ReplyLabel : std::uint8_t { buy, sell, other };

inline constexpr std::size_t kReplyLabelCount = 3;

/// Outcome of manually reviewing one supply-chain link.
enum class LinkValidationLabel : std::uint8_t {
  related,
  resell,
  unrelated,
  lack_of_product,
  lack_of_purchase,
};

inline constexpr std::size_t kLinkValidationLabelCount = 5;

inline constexpr std::array<ProductCategory, kProductCategoryCount> kAllProductCategories{
    ProductCategory::account,       ProductCategory::botnet,
    ProductCategory::crypter,       ProductCategory::ddos_service,
    ProductCategory::hacked_server, ProductCategory::hack_for_hire,
    ProductCategory::hosting,       ProductCategory::malware,
    ProductCategory::proxy,         ProductCategory::social_booster,
    ProductCategory::spam_tool,     ProductCategory::traffic,
    ProductCategory::video_game_service, ProductCategory::other,
};

inline constexpr std::array<ReplyLabel, kReplyLabelCount> kAllReplyLabels{
    ReplyLabel::buy, ReplyLabel::sell, ReplyLabel::other};

inline constexpr std::array<LinkValidationLabel, kLinkValidationLabelCount>
    kAllLinkValidationLabels{
        LinkValidationLabel::related, LinkValidationLabel::resell,
        LinkValidationLabel::unrelated, LinkValidationLabel::lack_of_product,
        LinkValidationLabel::lack_of_purchase};

std::string_view to_string(ProductCategory c) noexcept;
std::string_view to_string(ReplyLabel r) noexcept;
std::string_view to_string(LinkValidationLabel l) noexcept;

// Parsing is case-insensitive; '-' and ' ' are accepted in place of '_'.
std::optional<ProductCategory> parse_product_category(std::string_view s);
std::optional<ReplyLabel> parse_reply_label(std::string_view s);
std::optional<LinkValidationLabel> parse_link_validation_label(std::string_view s);

constexpr std::size_t index_of(ProductCategory c) noexcept {
  return static_cast<std::size_t>(c);
}
constexpr std::size_t index_of(ReplyLabel r) noexcept {
  return static_cast<std::size_t>(r);
}
constexpr std::size_t index_of(LinkValidationLabel l) noexcept {
  return static_cast<std::size_t>(l);
}

constexpr bool is_relevant(LinkValidationLabel l) noexcept {
  return l == LinkValidationLabel::related || l == LinkValidationLabel::resell;
}

}  // namespace chainforge
