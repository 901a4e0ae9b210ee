#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "chainforge/chains.hpp"
#include "chainforge/corpus.hpp"
#include "chainforge/label_set.hpp"
#include "chainforge/validate.hpp"

namespace chainforge {

struct PlantedChainSpec {
  ProductCategory src = ProductCategory::other;
  ProductCategory dst = ProductCategory::other;
  std::size_t count = 0;
};

/// Knobs for the synthetic forum. Vocabularies must be pairwise disjoint.
struct SynthConfig {
  std::uint64_t seed = 42;
  std::string forum_name = "synthetic";
  /// Product threads per category (including `other`).
  std::size_t docs_per_category = 300;
  std::size_t n_sellers = 400;
  std::size_t n_buyers = 1200;
  std::size_t min_replies = 1;
  std::size_t max_replies = 5;
  double buy_rate = 0.35;
  double sell_rate = 0.10;
  /// Chance that a thread receives a vouch (an `other` reply by another seller).
  double vouch_rate = 0.0;
  /// Chance that an ordinary reply starts by quoting the product post.
  double quote_rate = 0.1;
  std::size_t product_words_min = 9;
  std::size_t product_words_max = 15;
  /// Fraction of product-post words drawn from the category vocabulary.
  double keyword_share = 0.7;
  Timestamp start_time = 1420070400;  // 2015-01-01
  Timestamp end_time = 1514678400;    // 2017-12-31
  /// Replies land within this many seconds of their product post.
  std::int64_t reply_window_seconds = 30 * 86400;
  /// Buy replies on each planted sale thread.
  std::size_t planted_sale_buys = 1;
  std::vector<PlantedChainSpec> planted_chains;

  std::map<ProductCategory, std::vector<std::string>> category_vocabulary;
  std::map<ReplyLabel, std::vector<std::string>> reply_vocabulary;
  std::vector<std::string> vouch_vocabulary;
  std::vector<std::string> filler_vocabulary;

  /// Config with the built-in vocabularies and no planted chains.
  static SynthConfig defaults();
  /// Overlays keys present in `j` onto defaults(); dates accept epoch
  /// seconds or ISO-8601 strings.
  static SynthConfig from_json(const nlohmann::json& j);
  static SynthConfig load(const std::string& path);
  nlohmann::json to_json() const;

  /// Throws InvalidArgument for overlapping vocabularies, empty word lists,
  /// bad ranges or rates.
  void validate() const;
};

struct PlantedLink {
  UserId middle_user;
  ProductCategory src_category = ProductCategory::other;
  ProductCategory dst_category = ProductCategory::other;
  ThreadId src_thread;
  PostId purchase_reply;
  Timestamp purchase_time = 0;
  ThreadId dst_thread;
  PostId sale_post;
  std::vector<PostId> sale_replies;
  Timestamp sale_time = 0;
};

struct GroundTruth {
  LabelSet labels;
  std::vector<PlantedLink> planted;
  ForumStats declared_stats;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static GroundTruth from_json(const nlohmann::json& j);
  static GroundTruth load(const std::string& path);
};

struct SynthCorpus {
  Corpus corpus;
  GroundTruth truth;
};

/// Deterministic for a given config. Each planted chain is a fresh middle
/// user who posts a buy reply on a src-category thread and later authors a
/// dst-category thread that receives `planted_sale_buys` buy replies. Only
/// middle users both buy and sell, so with perfect labels the filtered graph
/// links exactly the planted pairs. Vouches come from sellers, which is what
/// the unfiltered baseline mistakes for purchases.
/// Throws InvalidArgument when the planted chains cannot be placed.
SynthCorpus generate(const SynthConfig& config);

/// Writes `corpus.jsonl` and `truth.json` into `dir` (created if needed).
void write_synth(const SynthCorpus& synth, const std::string& dir);

/// Labels links the way a reviewer with ground truth would: lack_of_product
/// if either product post is truly `other`, lack_of_purchase if either reply
/// is truly not `buy`, related/resell for planted pairs, unrelated otherwise.
LinkLabels label_links_from_truth(std::span<const SupplyChainLink> links, const GroundTruth& truth);

struct PlantedRecovery {
  std::size_t planted = 0;
  std::size_t recovered = 0;
  std::size_t found = 0;
  std::size_t found_matching = 0;
  double recall() const noexcept { return planted ? double(recovered) / double(planted) : 1.0; }
  double precision() const noexcept { return found ? double(found_matching) / double(found) : 1.0; }
};

/// A found link matches a planted one when it has the same middle user,
/// purchase reply and sale product post.
PlantedRecovery planted_recovery(std::span<const SupplyChainLink> links, const GroundTruth& truth);

}  // namespace chainforge
