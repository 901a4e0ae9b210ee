#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "chainforge/sparse_vector.hpp"

namespace chainforge {

struct NgramParams {
  std::size_t n_min = 2;
  std::size_t n_max = 5;
  std::size_t min_df = 2;
  std::size_t max_features = 200'000;
  bool normalize = true;

  /// Throws InvalidArgument unless 1 <= n_min <= n_max <= 8, min_df >= 1
  /// and max_features >= 1.
  void validate() const;
  friend bool operator==(const NgramParams&, const NgramParams&) = default;
};

/// Character n-grams (counted in code points, after case folding) with their
/// document frequencies. Column indices follow lexicographic term order.
class NgramVocabulary {
 public:
  NgramVocabulary() = default;
  NgramVocabulary(std::size_t n_min, std::size_t n_max, std::vector<std::string> terms,
                  std::vector<std::uint32_t> document_frequency);

  std::size_t n_min() const noexcept { return n_min_; }
  std::size_t n_max() const noexcept { return n_max_; }
  std::size_t size() const noexcept { return terms_.size(); }
  std::span<const std::string> terms() const noexcept { return terms_; }
  std::span<const std::uint32_t> document_frequency() const noexcept { return df_; }
  std::optional<std::uint32_t> index_of(std::string_view term) const;

 private:
  std::size_t n_min_ = 0;
  std::size_t n_max_ = 0;
  std::vector<std::string> terms_;
  std::vector<std::uint32_t> df_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// Fitted TF-IDF featurizer: value(t) = count(t, doc) * idf(t), optionally
/// L2-normalized, with idf(t) = ln((1 + N) / (1 + df(t))) + 1.
class TfidfModel {
 public:
  static constexpr int kFormatVersion = 1;

  TfidfModel() = default;

  /// Throws InvalidArgument on bad params or an empty `docs` list and
  /// SchemaError("empty vocabulary") when no term survives.
  static TfidfModel fit(std::span<const std::string> docs, const NgramParams& params = {});

  SparseVector transform(std::string_view doc) const;
  std::vector<SparseVector> transform(std::span<const std::string> docs) const;

  const NgramParams& params() const noexcept { return params_; }
  const NgramVocabulary& vocabulary() const noexcept { return vocab_; }
  std::span<const double> idf() const noexcept { return idf_; }
  std::size_t n_docs_fitted() const noexcept { return n_docs_; }
  std::size_t dimension() const noexcept { return vocab_.size(); }

  /// Content hash of params, vocabulary and idf; linear models record it so
  /// they refuse vectors from a different featurizer.
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

  nlohmann::json to_json() const;
  static TfidfModel from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static TfidfModel load(const std::string& path);

 private:
  void compute_fingerprint();

  NgramParams params_;
  NgramVocabulary vocab_;
  std::vector<double> idf_;
  std::size_t n_docs_ = 0;
  std::uint64_t fingerprint_ = 0;
};

/// Case-folded character n-grams of `doc` for every length in [n_min, n_max],
/// in order of occurrence (duplicates included).
std::vector<std::string> char_ngrams(std::string_view doc, std::size_t n_min, std::size_t n_max);

}  // namespace chainforge
