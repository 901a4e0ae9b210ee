#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "chainforge/corpus.hpp"
#include "chainforge/label_set.hpp"
#include "chainforge/labels.hpp"

namespace chainforge {

/// `seller` sold a `category` product to `buyer`; the buy reply's timestamp
/// is the purchase time.
struct InteractionEdge {
  UserId seller;
  UserId buyer;
  ProductCategory category = ProductCategory::other;
  ThreadId thread;
  PostId sell_post;
  PostId buy_reply;
  Timestamp sell_time = 0;
  Timestamp purchase_time = 0;
  /// Classifier label of the reply (baseline mode keeps non-buy replies).
  ReplyLabel reply_label = ReplyLabel::buy;

  friend bool operator==(const InteractionEdge&, const InteractionEdge&) = default;
};

/// Sort order used everywhere edges are listed.
bool edge_order(const InteractionEdge& a, const InteractionEdge& b);

enum class GraphMode {
  /// Only replies labeled `buy` create edges.
  filtered,
  /// Every reply creates an edge, whatever its label.
  baseline,
};

std::string_view to_string(GraphMode m) noexcept;
GraphMode parse_graph_mode(std::string_view s);

struct BuildCounters {
  std::size_t threads_seen = 0;
  std::size_t other_threads = 0;
  std::size_t unlabeled_threads = 0;
  std::size_t unlabeled_replies = 0;
  std::size_t self_replies = 0;
  std::size_t non_buy_replies = 0;
  std::size_t sell_replies = 0;
  std::size_t early_replies = 0;
  std::size_t dangling_labels = 0;
};

/// Directed multigraph of sales between users.
class InteractionGraph {
 public:
  InteractionGraph() = default;
  InteractionGraph(GraphMode mode, std::vector<InteractionEdge> edges);

  GraphMode mode() const noexcept { return mode_; }
  /// Sorted by purchase_time, then sell_post, then buy_reply.
  const std::vector<InteractionEdge>& edges() const noexcept { return edges_; }
  /// Every seller and buyer, sorted.
  const std::vector<UserId>& nodes() const noexcept { return nodes_; }
  bool empty() const noexcept { return edges_.empty(); }

  /// Indices of edges where `user` is the buyer / the seller, in edge order.
  const std::vector<std::size_t>& purchases_of(const UserId& user) const;
  const std::vector<std::size_t>& sales_of(const UserId& user) const;

  BuildCounters counters;

 private:
  GraphMode mode_ = GraphMode::filtered;
  std::vector<InteractionEdge> edges_;
  std::vector<UserId> nodes_;
  std::map<UserId, std::vector<std::size_t>, std::less<>> purchases_;
  std::map<UserId, std::vector<std::size_t>, std::less<>> sales_;
};

/// One edge per qualifying reply from the thread author to the reply author.
/// Threads whose product post is `other` or unlabeled never produce edges,
/// replies by the thread author are ignored, and in filtered mode only
/// `buy` replies count. Skips are tallied in `counters`.
InteractionGraph build_graph(const Corpus& corpus, const LabelSet& labels, GraphMode mode);

struct GraphSummary {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::map<ProductCategory, std::size_t> per_category;
};
GraphSummary summarize(const InteractionGraph& graph);
nlohmann::json to_json(const GraphSummary& summary);

nlohmann::json to_json(const InteractionEdge& e);
InteractionEdge edge_from_json(const nlohmann::json& j);

/// JSON Lines: a header object {"format": "chainforge.edges", "version",
/// "mode"} followed by one edge per line.
void write_edges_jsonl(const InteractionGraph& graph, std::ostream& out);
void write_edges_jsonl(const InteractionGraph& graph, const std::string& path);
InteractionGraph read_edges_jsonl(std::istream& in);
InteractionGraph read_edges_jsonl(const std::string& path);

}  // namespace chainforge
