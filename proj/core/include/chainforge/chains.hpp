#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "chainforge/graph.hpp"
#include "chainforge/labels.hpp"
#include "chainforge/weight.hpp"

namespace chainforge {

/// A user who bought (purchase) and later sold (sale): the pair of
/// interaction edges around `middle_user`.
struct SupplyChainLink {
  /// "<purchase buy reply>><sale buy reply>"; unique per edge pair.
  std::string id;
  UserId middle_user;
  InteractionEdge purchase;
  InteractionEdge sale;
  ProductCategory src_category = ProductCategory::other;
  ProductCategory dst_category = ProductCategory::other;
  /// Discovery level of the sale's buyer. The source category sits one level
  /// further upstream (level + 1).
  std::uint32_t level = 0;
  /// n in the 1/n attenuation; 0 until attenuate() runs.
  std::uint32_t share_count = 0;

  double weight() const noexcept { return share_count == 0 ? 0.0 : 1.0 / share_count; }
  Rational exact_weight() const { return Rational(share_count == 0 ? 0 : 1, share_count == 0 ? 1 : share_count); }
};

std::string make_link_id(const InteractionEdge& purchase, const InteractionEdge& sale);

enum class Traversal {
  /// Every chronologically valid (purchase, sale) pair per middle user.
  exhaustive,
  /// The modified breadth-first search: each user is discovered once.
  bfs,
};

std::string_view to_string(Traversal t) noexcept;
Traversal parse_traversal(std::string_view s);

struct LinkOptions {
  Traversal traversal = Traversal::exhaustive;
  /// Maximum seconds between purchase and sale; unbounded when empty.
  std::optional<std::int64_t> max_gap_seconds;
};

struct LinkDiscovery {
  std::vector<SupplyChainLink> links;
  /// Discovery level of every user in the interaction graph.
  std::map<UserId, std::uint32_t, std::less<>> user_levels;
};

/// True when `purchase` strictly precedes `sale` (and within the gap).
bool chronological(const InteractionEdge& purchase, const InteractionEdge& sale,
                   const LinkOptions& options);

/// Discovers supply-chain links (unweighted). Levels come from a backward
/// breadth-first pass (buyer -> the users who sold to them). Roots are taken
/// users-who-never-sold first, each group sorted by id.
LinkDiscovery find_links(const InteractionGraph& graph, const LinkOptions& options = {});

/// Gives each of a middle user's n links the weight 1/n.
std::vector<SupplyChainLink> attenuate(std::vector<SupplyChainLink> links);

/// Total exact weight contributed by each middle user.
std::map<UserId, Rational> weight_per_middle_user(std::span<const SupplyChainLink> links);

struct ChainNode {
  ProductCategory category = ProductCategory::other;
  std::uint32_t level = 0;
  friend auto operator<=>(const ChainNode&, const ChainNode&) = default;
};

struct ChainEdge {
  ChainNode src;
  ChainNode dst;
  UnitFractionSum weight;
  /// Sorted ids of the links that contributed.
  std::vector<std::string> link_ids;
};

/// Category-level supply-chain graph with discovery levels.
struct SupplyChainGraph {
  std::vector<ChainNode> nodes;
  std::vector<ChainEdge> edges;

  /// Level-free view: summed weight per (src category, dst category).
  std::map<std::pair<ProductCategory, ProductCategory>, UnitFractionSum> category_edges() const;
  nlohmann::json to_json() const;
  /// Graphviz digraph with one node per (category, level).
  std::string to_dot() const;
};

/// Sums link weights per (src node, dst node). Links must be attenuated.
SupplyChainGraph aggregate(std::span<const SupplyChainLink> links);

struct ValidationFilterResult {
  std::vector<SupplyChainLink> links;
  std::size_t unlabeled = 0;
  std::size_t rejected = 0;
};

/// Keeps links whose label is related or resell; unlabeled links are dropped
/// and counted.
ValidationFilterResult filter_by_validation(
    std::span<const SupplyChainLink> links,
    const std::map<std::string, LinkValidationLabel, std::less<>>& labels);

/// Seeded uniform sample of `count` links (all of them when count >= size),
/// returned in input order. Weights are cleared; attenuate the sample again.
std::vector<SupplyChainLink> sample_links(std::span<const SupplyChainLink> links,
                                          std::size_t count, std::uint64_t seed);

nlohmann::json to_json(const SupplyChainLink& link);
SupplyChainLink link_from_json(const nlohmann::json& j);

/// JSON Lines: header {"format": "chainforge.links", "version", "traversal"}
/// then one link per line with full edge provenance.
void write_links_jsonl(std::span<const SupplyChainLink> links, Traversal traversal,
                       std::ostream& out);
void write_links_jsonl(std::span<const SupplyChainLink> links, Traversal traversal,
                       const std::string& path);
std::vector<SupplyChainLink> read_links_jsonl(std::istream& in);
std::vector<SupplyChainLink> read_links_jsonl(const std::string& path);

}  // namespace chainforge
