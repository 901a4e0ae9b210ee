#include "chainforge/featurize.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "chainforge/error.hpp"
#include "chainforge/text.hpp"

namespace chainforge {

using nlohmann::json;

// ---------------------------------------------------------------------------
// SparseVector

SparseVector SparseVector::from_pairs(std::size_t dimension,
                                      std::vector<std::pair<Index, double>> pairs) {
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseVector v(dimension);
  v.indices_.reserve(pairs.size());
  v.values_.reserve(pairs.size());
  std::size_t i = 0;
  while (i < pairs.size()) {
    const Index idx = pairs[i].first;
    if (idx >= dimension) {
      throw InvalidArgument("sparse index " + std::to_string(idx) + " out of range for dimension " +
                            std::to_string(dimension));
    }
    double sum = 0.0;
    for (; i < pairs.size() && pairs[i].first == idx; ++i) sum += pairs[i].second;
    if (sum != 0.0) {
      v.indices_.push_back(idx);
      v.values_.push_back(sum);
    }
  }
  return v;
}

double SparseVector::at(Index index) const noexcept {
  auto it = std::lower_bound(indices_.begin(), indices_.end(), index);
  if (it == indices_.end() || *it != index) return 0.0;
  return values_[static_cast<std::size_t>(it - indices_.begin())];
}

double SparseVector::squared_norm() const noexcept {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s;
}

void SparseVector::normalize() noexcept {
  const double n = norm();
  if (n == 0.0) return;
  for (double& v : values_) v /= n;
}

std::vector<double> SparseVector::to_dense() const {
  std::vector<double> d(dimension_, 0.0);
  for (std::size_t k = 0; k < indices_.size(); ++k) d[indices_[k]] = values_[k];
  return d;
}

// ---------------------------------------------------------------------------
// Vocabulary

void NgramParams::validate() const {
  if (n_min < 1 || n_min > n_max || n_max > 8) {
    throw InvalidArgument("n-gram range must satisfy 1 <= n_min <= n_max <= 8 (got " +
                          std::to_string(n_min) + ".." + std::to_string(n_max) + ")");
  }
  if (min_df < 1) throw InvalidArgument("min_df must be >= 1");
  if (max_features < 1) throw InvalidArgument("max_features must be >= 1");
}

NgramVocabulary::NgramVocabulary(std::size_t n_min, std::size_t n_max,
                                 std::vector<std::string> terms,
                                 std::vector<std::uint32_t> document_frequency)
    : n_min_(n_min), n_max_(n_max), terms_(std::move(terms)), df_(std::move(document_frequency)) {
  if (terms_.size() != df_.size()) throw SchemaError("vocabulary: terms/df length mismatch");
  index_.reserve(terms_.size());
  for (std::uint32_t i = 0; i < terms_.size(); ++i) {
    if (!index_.emplace(terms_[i], i).second) throw SchemaError("vocabulary: duplicate term");
  }
}

std::optional<std::uint32_t> NgramVocabulary::index_of(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> char_ngrams(std::string_view doc, std::size_t n_min, std::size_t n_max) {
  const auto cps = text::fold_case(text::decode_utf8(doc));
  std::vector<std::string> out;
  for (std::size_t n = n_min; n <= n_max; ++n) {
    if (cps.size() < n) break;
    for (std::size_t i = 0; i + n <= cps.size(); ++i) {
      out.push_back(text::encode_utf8(std::u32string_view(cps).substr(i, n)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// TfidfModel

TfidfModel TfidfModel::fit(std::span<const std::string> docs, const NgramParams& params) {
  params.validate();
  if (docs.empty()) throw InvalidArgument("fit requires at least one document");

  std::unordered_map<std::string, std::uint32_t> df;
  std::unordered_set<std::string> seen;
  for (const auto& doc : docs) {
    seen.clear();
    for (auto& g : char_ngrams(doc, params.n_min, params.n_max)) seen.insert(std::move(g));
    for (const auto& g : seen) ++df[g];
  }

  std::vector<std::pair<std::string, std::uint32_t>> kept;
  kept.reserve(df.size());
  for (auto& [term, count] : df) {
    if (count >= params.min_df) kept.emplace_back(term, count);
  }
  if (kept.empty()) throw SchemaError("empty vocabulary");

  if (kept.size() > params.max_features) {
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    kept.resize(params.max_features);
  }
  std::sort(kept.begin(), kept.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<std::string> terms;
  std::vector<std::uint32_t> dfs;
  terms.reserve(kept.size());
  dfs.reserve(kept.size());
  for (auto& [t, c] : kept) {
    terms.push_back(std::move(t));
    dfs.push_back(c);
  }

  TfidfModel m;
  m.params_ = params;
  m.n_docs_ = docs.size();
  m.idf_.reserve(dfs.size());
  const double n = static_cast<double>(m.n_docs_);
  for (auto d : dfs) m.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(d))) + 1.0);
  m.vocab_ = NgramVocabulary(params.n_min, params.n_max, std::move(terms), std::move(dfs));
  m.compute_fingerprint();
  return m;
}

SparseVector TfidfModel::transform(std::string_view doc) const {
  std::vector<std::pair<SparseVector::Index, double>> pairs;
  for (const auto& g : char_ngrams(doc, params_.n_min, params_.n_max)) {
    if (auto idx = vocab_.index_of(g)) pairs.emplace_back(*idx, 1.0);
  }
  auto v = SparseVector::from_pairs(vocab_.size(), std::move(pairs));
  std::vector<std::pair<SparseVector::Index, double>> weighted;
  weighted.reserve(v.nnz());
  for (std::size_t k = 0; k < v.nnz(); ++k) {
    weighted.emplace_back(v.indices()[k], v.values()[k] * idf_[v.indices()[k]]);
  }
  auto out = SparseVector::from_pairs(vocab_.size(), std::move(weighted));
  if (params_.normalize) out.normalize();
  return out;
}

std::vector<SparseVector> TfidfModel::transform(std::span<const std::string> docs) const {
  std::vector<SparseVector> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(transform(d));
  return out;
}

void TfidfModel::compute_fingerprint() {
  std::uint64_t h = text::fnv1a("chainforge.tfidf");
  auto mix = [&](std::string_view s) {
    h = text::fnv1a(s, h);
    h = text::fnv1a(std::string_view("\x1f", 1), h);
  };
  mix(std::to_string(params_.n_min));
  mix(std::to_string(params_.n_max));
  mix(std::to_string(params_.min_df));
  mix(std::to_string(params_.max_features));
  mix(params_.normalize ? "l2" : "raw");
  mix(std::to_string(n_docs_));
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    mix(vocab_.terms()[i]);
    mix(std::to_string(vocab_.document_frequency()[i]));
    mix(text::hex64(std::bit_cast<std::uint64_t>(idf_[i])));
  }
  fingerprint_ = h;
}

json TfidfModel::to_json() const {
  return {{"format", "chainforge.tfidf"},
          {"version", kFormatVersion},
          {"params",
           {{"n_min", params_.n_min},
            {"n_max", params_.n_max},
            {"min_df", params_.min_df},
            {"max_features", params_.max_features},
            {"normalize", params_.normalize}}},
          {"n_docs", n_docs_},
          {"fingerprint", text::hex64(fingerprint_)},
          {"terms", vocab_.terms()},
          {"df", vocab_.document_frequency()},
          {"idf", idf_}};
}

TfidfModel TfidfModel::from_json(const json& j) {
  if (j.value("format", "") != "chainforge.tfidf") throw SchemaError("not a tfidf model file");
  const int version = j.at("version").get<int>();
  if (version != kFormatVersion) {
    throw SchemaError("tfidf model version " + std::to_string(version) + " unsupported (expected " +
                      std::to_string(kFormatVersion) + ")");
  }
  TfidfModel m;
  const auto& p = j.at("params");
  m.params_.n_min = p.at("n_min").get<std::size_t>();
  m.params_.n_max = p.at("n_max").get<std::size_t>();
  m.params_.min_df = p.at("min_df").get<std::size_t>();
  m.params_.max_features = p.at("max_features").get<std::size_t>();
  m.params_.normalize = p.at("normalize").get<bool>();
  m.params_.validate();
  m.n_docs_ = j.at("n_docs").get<std::size_t>();
  m.vocab_ = NgramVocabulary(m.params_.n_min, m.params_.n_max,
                             j.at("terms").get<std::vector<std::string>>(),
                             j.at("df").get<std::vector<std::uint32_t>>());
  m.idf_ = j.at("idf").get<std::vector<double>>();
  if (m.idf_.size() != m.vocab_.size()) throw SchemaError("tfidf model: idf length mismatch");
  m.compute_fingerprint();
  if (auto it = j.find("fingerprint"); it != j.end() && it->get<std::string>() != text::hex64(m.fingerprint_)) {
    throw SchemaError("tfidf model: fingerprint does not match content");
  }
  return m;
}

void TfidfModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model file: " + path);
  out << to_json().dump() << '\n';
}

TfidfModel TfidfModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file: " + path);
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw SchemaError("model file " + path + ": " + e.what());
  }
}

}  // namespace chainforge
