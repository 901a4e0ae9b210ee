#include "chainforge/graph.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "chainforge/error.hpp"

namespace chainforge {

using nlohmann::json;

bool edge_order(const InteractionEdge& a, const InteractionEdge& b) {
  if (a.purchase_time != b.purchase_time) return a.purchase_time < b.purchase_time;
  if (a.sell_post != b.sell_post) return a.sell_post < b.sell_post;
  return a.buy_reply < b.buy_reply;
}

std::string_view to_string(GraphMode m) noexcept {
  return m == GraphMode::filtered ? "filtered" : "baseline";
}

GraphMode parse_graph_mode(std::string_view s) {
  if (s == "filtered") return GraphMode::filtered;
  if (s == "baseline") return GraphMode::baseline;
  throw InvalidArgument("unknown graph mode '" + std::string(s) + "' (expected filtered|baseline)");
}

InteractionGraph::InteractionGraph(GraphMode mode, std::vector<InteractionEdge> edges)
    : mode_(mode), edges_(std::move(edges)) {
  std::sort(edges_.begin(), edges_.end(), edge_order);
  std::set<UserId> nodes;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    if (e.seller == e.buyer) throw InvalidArgument("self-sale edge for user " + e.seller);
    purchases_[e.buyer].push_back(i);
    sales_[e.seller].push_back(i);
    nodes.insert(e.seller);
    nodes.insert(e.buyer);
  }
  nodes_.assign(nodes.begin(), nodes.end());
}

const std::vector<std::size_t>& InteractionGraph::purchases_of(const UserId& user) const {
  static const std::vector<std::size_t> kNone;
  auto it = purchases_.find(user);
  return it == purchases_.end() ? kNone : it->second;
}

const std::vector<std::size_t>& InteractionGraph::sales_of(const UserId& user) const {
  static const std::vector<std::size_t> kNone;
  auto it = sales_.find(user);
  return it == sales_.end() ? kNone : it->second;
}

InteractionGraph build_graph(const Corpus& corpus, const LabelSet& labels, GraphMode mode) {
  BuildCounters counters;
  std::vector<InteractionEdge> edges;
  for (const auto& tid : corpus.thread_ids()) {
    const auto posts = corpus.thread(tid);
    ++counters.threads_seen;
    const Post& product = posts.front();
    auto cat = labels.products.find(product.post_id);
    if (cat == labels.products.end()) {
      ++counters.unlabeled_threads;
      continue;
    }
    if (cat->second == ProductCategory::other) {
      ++counters.other_threads;
      continue;
    }
    for (const auto& reply : posts.subspan(1)) {
      if (reply.author == product.author) {
        ++counters.self_replies;
        continue;
      }
      auto rl = labels.replies.find(reply.post_id);
      ReplyLabel label = ReplyLabel::other;
      if (rl != labels.replies.end()) {
        label = rl->second;
      } else if (mode == GraphMode::filtered) {
        ++counters.unlabeled_replies;
        continue;
      }
      if (label == ReplyLabel::sell) ++counters.sell_replies;
      if (mode == GraphMode::filtered && label != ReplyLabel::buy) {
        ++counters.non_buy_replies;
        continue;
      }
      if (reply.timestamp < product.timestamp) {
        ++counters.early_replies;
        continue;
      }
      edges.push_back({product.author, reply.author, cat->second, tid, product.post_id,
                       reply.post_id, product.timestamp, reply.timestamp, label});
    }
  }
  // Labels naming posts the corpus does not contain.
  for (const auto& [id, c] : labels.products) {
    if (!corpus.find(id)) ++counters.dangling_labels;
  }
  for (const auto& [id, r] : labels.replies) {
    if (!corpus.find(id)) ++counters.dangling_labels;
  }
  InteractionGraph g(mode, std::move(edges));
  g.counters = counters;
  return g;
}

GraphSummary summarize(const InteractionGraph& graph) {
  GraphSummary s;
  s.nodes = graph.nodes().size();
  s.edges = graph.edges().size();
  for (const auto& e : graph.edges()) ++s.per_category[e.category];
  return s;
}

json to_json(const GraphSummary& s) {
  json cats = json::object();
  for (const auto& [c, n] : s.per_category) cats[std::string(to_string(c))] = n;
  return {{"nodes", s.nodes}, {"edges", s.edges}, {"per_category", cats}};
}

json to_json(const InteractionEdge& e) {
  return {{"seller", e.seller},
          {"buyer", e.buyer},
          {"category", to_string(e.category)},
          {"thread", e.thread},
          {"sell_post", e.sell_post},
          {"buy_reply", e.buy_reply},
          {"sell_time", e.sell_time},
          {"purchase_time", e.purchase_time},
          {"reply_label", to_string(e.reply_label)}};
}

InteractionEdge edge_from_json(const json& j) {
  InteractionEdge e;
  e.seller = j.at("seller").get<std::string>();
  e.buyer = j.at("buyer").get<std::string>();
  const auto cat = j.at("category").get<std::string>();
  auto c = parse_product_category(cat);
  if (!c) throw SchemaError("edge: unknown category '" + cat + "'");
  e.category = *c;
  e.thread = j.at("thread").get<std::string>();
  e.sell_post = j.at("sell_post").get<std::string>();
  e.buy_reply = j.at("buy_reply").get<std::string>();
  e.sell_time = j.at("sell_time").get<Timestamp>();
  e.purchase_time = j.at("purchase_time").get<Timestamp>();
  auto r = parse_reply_label(j.value("reply_label", std::string("buy")));
  if (!r) throw SchemaError("edge: unknown reply label");
  e.reply_label = *r;
  return e;
}

void write_edges_jsonl(const InteractionGraph& graph, std::ostream& out) {
  out << json{{"format", "chainforge.edges"}, {"version", 1}, {"mode", to_string(graph.mode())}}.dump()
      << '\n';
  for (const auto& e : graph.edges()) out << to_json(e).dump() << '\n';
}

void write_edges_jsonl(const InteractionGraph& graph, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write edges file: " + path);
  write_edges_jsonl(graph, out);
}

InteractionGraph read_edges_jsonl(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("edges file is empty");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("edges header: ") + e.what());
  }
  if (header.value("format", "") != "chainforge.edges") throw SchemaError("not an edges file");
  if (header.value("version", 0) != 1) throw SchemaError("unsupported edges file version");
  const auto mode = parse_graph_mode(header.at("mode").get<std::string>());
  std::vector<InteractionEdge> edges;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      edges.push_back(edge_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw SchemaError("edges line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return InteractionGraph(mode, std::move(edges));
}

InteractionGraph read_edges_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open edges file: " + path);
  return read_edges_jsonl(in);
}

}  // namespace chainforge
