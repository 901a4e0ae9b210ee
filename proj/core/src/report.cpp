#include "chainforge/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace chainforge {

using nlohmann::json;

std::string YearMonth::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u", year, month);
  return buf;
}

YearMonth YearMonth::next() const {
  return month == 12 ? YearMonth{year + 1, 1} : YearMonth{year, month + 1};
}

YearMonth YearMonth::of(Timestamp t) {
  using namespace std::chrono;
  const auto days = static_cast<int>((t >= 0 ? t : t - 86399) / 86400);
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month())};
}

std::array<double, kProductCategoryCount> TrendBucket::percent() const {
  std::array<double, kProductCategoryCount> p{};
  if (volume == 0) return p;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = 100.0 * static_cast<double>(counts[i]) / static_cast<double>(volume);
  }
  return p;
}

TrendSeries trend_series(const Corpus& corpus, const LabelSet& labels) {
  std::map<YearMonth, TrendBucket> by_month;
  for (const auto& p : corpus.posts()) {
    if (!p.is_product_post()) continue;
    auto it = labels.products.find(p.post_id);
    if (it == labels.products.end()) continue;
    auto& b = by_month[YearMonth::of(p.timestamp)];
    ++b.counts[index_of(it->second)];
    ++b.volume;
  }
  TrendSeries s;
  if (by_month.empty()) return s;
  const auto last = by_month.rbegin()->first;
  for (auto m = by_month.begin()->first; m <= last; m = m.next()) {
    auto it = by_month.find(m);
    TrendBucket b = it == by_month.end() ? TrendBucket{} : it->second;
    b.month = m;
    s.buckets.push_back(b);
  }
  return s;
}

std::string TrendSeries::to_csv() const {
  std::ostringstream out;
  out << "month,volume";
  for (auto c : kAllProductCategories) out << ",count_" << to_string(c);
  for (auto c : kAllProductCategories) out << ",pct_" << to_string(c);
  out << '\n';
  char buf[32];
  for (const auto& b : buckets) {
    out << b.month.to_string() << ',' << b.volume;
    for (auto n : b.counts) out << ',' << n;
    for (double p : b.percent()) {
      std::snprintf(buf, sizeof buf, "%.6f", p);
      out << ',' << buf;
    }
    out << '\n';
  }
  return out.str();
}

AlluvialExport export_alluvial(const SupplyChainGraph& graph,
                               const CategoryPredicate& category_filter) {
  AlluvialExport out;
  std::map<ChainNode, AlluvialNode> nodes;
  std::set<std::uint32_t> levels;
  for (const auto& e : graph.edges) {
    if (category_filter && !category_filter(e.src.category) && !category_filter(e.dst.category)) {
      continue;
    }
    const double w = e.weight.value();
    out.flows.push_back({e.src, e.dst, w, e.src.category, e.link_ids.size()});
    auto& s = nodes[e.src];
    s.category = e.src.category;
    s.level = e.src.level;
    s.chain_count += w;
    auto& d = nodes[e.dst];
    d.category = e.dst.category;
    d.level = e.dst.level;
    d.inflow += w;
    levels.insert(e.src.level);
    levels.insert(e.dst.level);
  }
  out.levels.assign(levels.rbegin(), levels.rend());
  for (auto& [key, n] : nodes) out.nodes.push_back(n);
  return out;
}

json AlluvialExport::to_json() const {
  auto node_ref = [](const ChainNode& n) {
    return json{{"category", to_string(n.category)}, {"level", n.level}};
  };
  json ns = json::array();
  for (const auto& n : nodes) {
    ns.push_back({{"category", to_string(n.category)},
                  {"level", n.level},
                  {"chain_count", n.chain_count},
                  {"inflow", n.inflow}});
  }
  json fs = json::array();
  for (const auto& f : flows) {
    fs.push_back({{"src", node_ref(f.src)},
                  {"dst", node_ref(f.dst)},
                  {"width", f.width},
                  {"color_key", to_string(f.color_key)},
                  {"links", f.links}});
  }
  json cats = json::array();
  for (auto c : kAllProductCategories) cats.push_back(to_string(c));
  return {{"format", "chainforge.alluvial"},
          {"schema_version", kSchemaVersion},
          {"categories", cats},
          {"levels", levels},
          {"nodes", ns},
          {"flows", fs}};
}

}  // namespace chainforge
