#include "chainforge/validate.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chainforge/error.hpp"
#include "chainforge/text.hpp"

namespace chainforge {

using nlohmann::json;

namespace {

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

bool read_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool quoted = false, any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      fields.push_back(std::move(field));
      return true;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

// Cleaned body of `post_id`, or nullopt when the post is absent.
std::optional<std::string> cleaned_body(const Corpus& corpus, const PostId& post_id,
                                        const QuoteConfig& quotes) {
  const Post* p = corpus.find(post_id);
  if (!p) return std::nullopt;
  if (p->position == 0) return text::collapse_whitespace(p->body);
  const auto thread = corpus.thread(p->thread_id);
  const auto pos = static_cast<std::size_t>(p - thread.data());
  return remove_quotes(*p, thread.first(pos), quotes);
}

}  // namespace

ReviewExport export_for_review(std::span<const SupplyChainLink> links, const Corpus& corpus,
                               const std::string& csv_path, const std::string& sidecar_path,
                               const QuoteConfig& quotes) {
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw IoError("cannot write review file: " + csv_path);
  csv << kReviewCsvVersionLine << '\n';
  for (std::size_t i = 0; i < kReviewColumns.size(); ++i) {
    csv << (i ? "," : "") << kReviewColumns[i];
  }
  csv << '\n';

  ReviewExport result;
  json sidecar = json::array();
  for (const auto& l : links) {
    const auto purchase_product = cleaned_body(corpus, l.purchase.sell_post, quotes);
    const auto purchase_reply = cleaned_body(corpus, l.purchase.buy_reply, quotes);
    const auto sale_product = cleaned_body(corpus, l.sale.sell_post, quotes);
    const auto sale_reply = cleaned_body(corpus, l.sale.buy_reply, quotes);
    const bool missing = !purchase_product || !purchase_reply || !sale_product || !sale_reply;
    if (missing) ++result.flagged;
    char weight[32];
    std::snprintf(weight, sizeof weight, "%.9g", l.weight());
    const std::string fields[] = {
        l.id,
        l.middle_user,
        std::string(to_string(l.src_category)),
        std::string(to_string(l.dst_category)),
        format_iso8601(l.purchase.purchase_time),
        format_iso8601(l.sale.purchase_time),
        l.purchase.sell_post,
        l.purchase.buy_reply,
        l.sale.sell_post,
        l.sale.buy_reply,
        weight,
        purchase_reply ? text::truncate_chars(*purchase_reply, kReviewExcerptChars)
                       : "[missing provenance]",
        sale_product ? text::truncate_chars(*sale_product, kReviewExcerptChars)
                     : "[missing provenance]",
        ""};
    for (std::size_t i = 0; i < std::size(fields); ++i) csv << (i ? "," : "") << csv_field(fields[i]);
    csv << '\n';
    auto body = [](const std::optional<std::string>& b) -> json {
      return b ? json(*b) : json(nullptr);
    };
    sidecar.push_back({{"link_id", l.id},
                       {"middle_user", l.middle_user},
                       {"missing_provenance", missing},
                       {"purchase_product_post", body(purchase_product)},
                       {"purchase_reply", body(purchase_reply)},
                       {"sale_product_post", body(sale_product)},
                       {"sale_reply", body(sale_reply)},
                       {"link", to_json(l)}});
    ++result.rows;
  }
  if (!csv) throw IoError("write failed: " + csv_path);
  std::ofstream side(sidecar_path, std::ios::binary);
  if (!side) throw IoError("cannot write review sidecar: " + sidecar_path);
  side << json{{"format", "chainforge.review"}, {"version", 1}, {"rows", sidecar}}.dump(
              2, ' ', false, json::error_handler_t::replace)
       << '\n';
  return result;
}

ImportedLabels import_labels_csv(std::istream& in) {
  std::vector<std::string> row;
  std::size_t row_no = 0;
  std::vector<std::string> header;
  while (read_record(in, row)) {
    ++row_no;
    if (!row.empty() && !row[0].empty() && row[0][0] == '#') continue;
    header = row;
    break;
  }
  if (header.empty()) throw SchemaError("review file has no header row");
  auto col = [&](std::string_view name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw SchemaError("review file lacks column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto id_col = col("link_id");
  const auto label_col = col("label");

  ImportedLabels out;
  while (read_record(in, row)) {
    ++row_no;
    if (row.size() == 1 && row[0].empty()) continue;
    if (!row.empty() && !row[0].empty() && row[0][0] == '#') continue;
    if (row.size() <= std::max(id_col, label_col)) {
      out.errors.push_back({row_no, "row has " + std::to_string(row.size()) + " columns"});
      continue;
    }
    const auto& id = row[id_col];
    const auto& raw = row[label_col];
    if (raw.find_first_not_of(" \t") == std::string::npos) {
      ++out.unlabeled_rows;
      continue;
    }
    auto label = parse_link_validation_label(raw);
    if (!label) {
      out.errors.push_back({row_no, "unknown label '" + raw + "' for link " + id});
      continue;
    }
    auto [it, inserted] = out.labels.emplace(id, *label);
    if (!inserted && it->second != *label) {
      throw SchemaError("link " + id + " has conflicting labels '" +
                        std::string(to_string(it->second)) + "' and '" +
                        std::string(to_string(*label)) + "' (row " + std::to_string(row_no) + ")");
    }
  }
  return out;
}

ImportedLabels import_labels(const std::string& csv_path) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw IoError("cannot open review file: " + csv_path);
  return import_labels_csv(in);
}

std::string_view to_string(ReportMode m) noexcept {
  return m == ReportMode::algorithm_output ? "algorithm_output" : "sample_baseline";
}

RelevanceReport RelevanceReport::from_totals(
    const std::array<double, kLinkValidationLabelCount>& totals, ReportMode mode) {
  RelevanceReport r;
  r.mode = mode;
  r.weight = totals;
  for (double w : totals) r.total += w;
  if (r.total > 0.0) {
    for (std::size_t i = 0; i < totals.size(); ++i) r.percent[i] = 100.0 * totals[i] / r.total;
    r.relevant_rate = (totals[index_of(LinkValidationLabel::related)] +
                       totals[index_of(LinkValidationLabel::resell)]) /
                      r.total;
  }
  return r;
}

RelevanceReport relevance_report(std::span<const SupplyChainLink> links, const LinkLabels& labels,
                                 ReportMode mode) {
  std::array<UnitFractionSum, kLinkValidationLabelCount> sums;
  for (const auto& l : links) {
    auto it = labels.find(l.id);
    if (it == labels.end()) throw SchemaError("link " + l.id + " has no validation label");
    if (l.share_count == 0) throw InvalidArgument("link " + l.id + " is not attenuated");
    sums[index_of(it->second)].add(l.share_count);
  }
  std::array<double, kLinkValidationLabelCount> totals{};
  for (std::size_t i = 0; i < totals.size(); ++i) totals[i] = sums[i].value();
  return RelevanceReport::from_totals(totals, mode);
}

json RelevanceReport::to_json() const {
  json labels = json::object();
  for (auto l : kAllLinkValidationLabels) {
    labels[std::string(to_string(l))] = {{"weight", weight[index_of(l)]},
                                         {"percent", percent[index_of(l)]}};
  }
  return {{"mode", to_string(mode)},
          {"labels", labels},
          {"total", total},
          {"relevant_rate", relevant_rate}};
}

std::string RelevanceReport::to_table() const {
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-18s %10s %8s   (%s)\n", "link type", "weight", "percent",
                std::string(to_string(mode)).c_str());
  out << buf;
  for (auto l : kAllLinkValidationLabels) {
    std::snprintf(buf, sizeof buf, "%-18s %10.2f %7.1f%%\n", std::string(to_string(l)).c_str(),
                  weight[index_of(l)], percent[index_of(l)]);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "%-18s %10.2f\n%-18s %9.1f%%\n", "total", total, "relevant",
                100.0 * relevant_rate);
  out << buf;
  return out.str();
}

BaselineComparison baseline_comparison(const RelevanceReport& filtered,
                                       const RelevanceReport& baseline) {
  if (filtered.mode == baseline.mode) {
    throw InvalidArgument("baseline comparison needs one algorithm_output and one sample_baseline report");
  }
  const auto& f = filtered.mode == ReportMode::algorithm_output ? filtered : baseline;
  const auto& b = filtered.mode == ReportMode::algorithm_output ? baseline : filtered;
  return {f.relevant_rate, b.relevant_rate, f.relevant_rate - b.relevant_rate};
}

json BaselineComparison::to_json() const {
  return {{"filtered_relevant_rate", filtered_rate},
          {"baseline_relevant_rate", baseline_rate},
          {"improvement", improvement}};
}

}  // namespace chainforge
