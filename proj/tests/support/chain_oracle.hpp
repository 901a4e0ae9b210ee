#pragma once

// Independent reference for link discovery: a plain double loop over every
// ordered pair of edges, no indexes, no traversal.

#include <set>
#include <string>
#include <vector>

#include "chainforge/chains.hpp"
#include "chainforge/graph.hpp"
#include "chainforge/rng.hpp"

namespace testing {

inline std::set<std::string> brute_force_link_ids(const std::vector<chainforge::InteractionEdge>& edges) {
  std::set<std::string> out;
  for (const auto& a : edges) {
    for (const auto& b : edges) {
      if (a.buyer == b.seller && a.purchase_time < b.purchase_time) {
        out.insert(a.buy_reply + ">" + b.buy_reply);
      }
    }
  }
  return out;
}

inline std::set<std::string> ids_of(const std::vector<chainforge::SupplyChainLink>& links) {
  std::set<std::string> out;
  for (const auto& l : links) out.insert(l.id);
  return out;
}

// Random multigraph over a small user pool so chains are common. Times are
// drawn from a narrow range so ties happen too.
inline chainforge::InteractionGraph random_graph(chainforge::Rng& rng, std::size_t n_edges) {
  using namespace chainforge;
  const auto users = 3 + rng.below(12);
  std::vector<InteractionEdge> edges;
  for (std::size_t i = 0; i < n_edges; ++i) {
    const auto s = rng.below(users);
    auto b = rng.below(users - 1);
    if (b >= s) ++b;
    InteractionEdge e;
    e.seller = "u" + std::to_string(s);
    e.buyer = "u" + std::to_string(b);
    e.category = kAllProductCategories[rng.below(kProductCategoryCount - 1)];
    e.thread = "t" + std::to_string(i);
    e.sell_post = e.thread + "-p0";
    e.buy_reply = e.thread + "-r1";
    e.purchase_time = static_cast<Timestamp>(rng.below(3 * n_edges + 1));
    e.sell_time = e.purchase_time;
    edges.push_back(e);
  }
  return InteractionGraph(GraphMode::filtered, std::move(edges));
}

}  // namespace testing
