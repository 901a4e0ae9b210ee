#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "chainforge/chains.hpp"
#include "chainforge/corpus.hpp"
#include "chainforge/labels.hpp"

namespace chainforge {

using LinkLabels = std::map<std::string, LinkValidationLabel, std::less<>>;

inline constexpr std::string_view kReviewCsvVersionLine = "# chainforge-review v1";
inline constexpr std::size_t kReviewExcerptChars = 500;

/// Column order of the review CSV (after the version comment line).
inline constexpr std::array<std::string_view, 14> kReviewColumns{
    "link_id",      "middle_user",   "src_category",  "dst_category", "purchase_time",
    "sale_time",    "purchase_post", "purchase_reply", "sale_post",   "sale_reply",
    "weight",       "purchase_excerpt", "sale_excerpt", "label"};

struct ReviewExport {
  std::size_t rows = 0;
  /// Rows whose posts are missing from the corpus (kept, with a flag).
  std::size_t flagged = 0;
};

/// Writes the spreadsheet-friendly CSV to `csv_path` and a JSON sidecar with
/// full (quote-stripped) bodies of all four posts per link to `sidecar_path`.
/// Excerpts are the quote-stripped buy reply of the purchase and the product
/// post of the sale, truncated to 500 characters.
ReviewExport export_for_review(std::span<const SupplyChainLink> links, const Corpus& corpus,
                               const std::string& csv_path, const std::string& sidecar_path,
                               const QuoteConfig& quotes = {});

struct RowError {
  std::size_t row = 0;
  std::string message;
};

struct ImportedLabels {
  LinkLabels labels;
  std::size_t unlabeled_rows = 0;
  std::vector<RowError> errors;
};

/// Reads a review CSV. Labels are case-insensitive; unknown labels are
/// reported per row and skipped; agreeing duplicates are merged; conflicting
/// duplicates throw SchemaError. Columns are located by header name, so
/// reordered or extra columns are tolerated.
ImportedLabels import_labels(const std::string& csv_path);
ImportedLabels import_labels_csv(std::istream& in);

enum class ReportMode { algorithm_output, sample_baseline };
std::string_view to_string(ReportMode m) noexcept;

struct RelevanceReport {
  ReportMode mode = ReportMode::algorithm_output;
  std::array<double, kLinkValidationLabelCount> weight{};
  std::array<double, kLinkValidationLabelCount> percent{};
  double total = 0.0;
  double relevant_rate = 0.0;

  /// Builds a report from attenuated weight totals per label.
  static RelevanceReport from_totals(
      const std::array<double, kLinkValidationLabelCount>& totals, ReportMode mode);

  nlohmann::json to_json() const;
  std::string to_table() const;
};

/// Sums attenuated link weight per label. Throws SchemaError if a link has
/// no label or InvalidArgument if a link is not attenuated.
RelevanceReport relevance_report(std::span<const SupplyChainLink> links, const LinkLabels& labels,
                                 ReportMode mode = ReportMode::algorithm_output);

struct BaselineComparison {
  double filtered_rate = 0.0;
  double baseline_rate = 0.0;
  /// filtered_rate - baseline_rate
  double improvement = 0.0;
  nlohmann::json to_json() const;
};

/// Throws InvalidArgument when both reports carry the same mode tag.
BaselineComparison baseline_comparison(const RelevanceReport& filtered,
                                       const RelevanceReport& baseline);

}  // namespace chainforge
