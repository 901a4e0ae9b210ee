#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "chainforge/chains.hpp"
#include "chainforge/corpus.hpp"
#include "chainforge/label_set.hpp"

namespace chainforge {

/// A UTC calendar month.
struct YearMonth {
  int year = 1970;
  unsigned month = 1;
  friend auto operator<=>(const YearMonth&, const YearMonth&) = default;
  std::string to_string() const;
  YearMonth next() const;
  static YearMonth of(Timestamp t);
};

struct TrendBucket {
  YearMonth month;
  std::array<std::size_t, kProductCategoryCount> counts{};
  std::size_t volume = 0;
  /// Percent of the bucket's volume per category; all zero for empty months.
  std::array<double, kProductCategoryCount> percent() const;
};

struct TrendSeries {
  /// One bucket per month from the first to the last labeled product post,
  /// empty months included.
  std::vector<TrendBucket> buckets;
  /// Header: month,volume, count_<category>..., pct_<category>...
  std::string to_csv() const;
};

/// Monthly category counts of labeled product posts. Posts without a label
/// are ignored.
TrendSeries trend_series(const Corpus& corpus, const LabelSet& labels);

struct AlluvialNode {
  ProductCategory category = ProductCategory::other;
  std::uint32_t level = 0;
  /// Weight of flows leaving this node.
  double chain_count = 0.0;
  /// Weight of flows entering this node.
  double inflow = 0.0;
};

struct AlluvialFlow {
  ChainNode src;
  ChainNode dst;
  double width = 0.0;
  ProductCategory color_key = ProductCategory::other;
  std::size_t links = 0;
};

/// Data behind one alluvial supply-chain figure. Columns run from the most
/// upstream level down to level 0.
struct AlluvialExport {
  static constexpr int kSchemaVersion = 1;
  std::vector<std::uint32_t> levels;
  std::vector<AlluvialNode> nodes;
  std::vector<AlluvialFlow> flows;

  nlohmann::json to_json() const;
};

using CategoryPredicate = std::function<bool(ProductCategory)>;

/// Flows mirror the graph's edges; with a filter, an edge is dropped only
/// when both its source and destination categories fail the predicate.
AlluvialExport export_alluvial(const SupplyChainGraph& graph,
                               const CategoryPredicate& category_filter = {});

}  // namespace chainforge
