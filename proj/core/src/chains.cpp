#include "chainforge/chains.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chainforge/error.hpp"
#include "chainforge/rng.hpp"

namespace chainforge {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Exact weights

namespace {

__extension__ using i128 = __int128;

std::int64_t checked(i128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw Error("rational overflow");
  return static_cast<std::int64_t>(v);
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw InvalidArgument("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const auto g = std::gcd(num, den);
  num_ = g == 0 ? 0 : num / g;
  den_ = g == 0 ? 1 : den / g;
}

Rational& Rational::operator+=(const Rational& o) {
  const auto g = std::gcd(den_, o.den_);
  const i128 num = static_cast<i128>(num_) * (o.den_ / g) + static_cast<i128>(o.num_) * (den_ / g);
  const i128 den = static_cast<i128>(den_) * (o.den_ / g);
  i128 a = num < 0 ? -num : num, b = den;
  while (b != 0) {
    const i128 t = a % b;
    a = b;
    b = t;
  }
  const i128 d = a == 0 ? 1 : a;
  *this = Rational(checked(num / d), checked(den / d));
  return *this;
}

std::string Rational::to_string() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

void UnitFractionSum::add(std::uint32_t denominator, std::uint64_t count) {
  if (denominator == 0) throw InvalidArgument("unit fraction with zero denominator");
  if (count != 0) counts_[denominator] += count;
}

UnitFractionSum& UnitFractionSum::operator+=(const UnitFractionSum& o) {
  for (const auto& [d, c] : o.counts_) counts_[d] += c;
  return *this;
}

double UnitFractionSum::value() const noexcept {
  long double s = 0.0L;
  for (const auto& [d, c] : counts_) s += static_cast<long double>(c) / static_cast<long double>(d);
  return static_cast<double>(s);
}

std::uint64_t UnitFractionSum::terms() const noexcept {
  std::uint64_t n = 0;
  for (const auto& [d, c] : counts_) n += c;
  return n;
}

// ---------------------------------------------------------------------------
// Link discovery

std::string make_link_id(const InteractionEdge& purchase, const InteractionEdge& sale) {
  return purchase.buy_reply + ">" + sale.buy_reply;
}

std::string_view to_string(Traversal t) noexcept {
  return t == Traversal::exhaustive ? "exhaustive" : "bfs";
}

Traversal parse_traversal(std::string_view s) {
  if (s == "exhaustive") return Traversal::exhaustive;
  if (s == "bfs") return Traversal::bfs;
  throw InvalidArgument("unknown traversal '" + std::string(s) + "' (expected exhaustive|bfs)");
}

bool chronological(const InteractionEdge& purchase, const InteractionEdge& sale,
                   const LinkOptions& options) {
  if (!(purchase.purchase_time < sale.purchase_time)) return false;
  return !options.max_gap_seconds ||
         sale.purchase_time - purchase.purchase_time <= *options.max_gap_seconds;
}

namespace {

SupplyChainLink make_link(const InteractionEdge& purchase, const InteractionEdge& sale,
                          std::uint32_t level) {
  SupplyChainLink l;
  l.id = make_link_id(purchase, sale);
  l.middle_user = purchase.buyer;
  l.purchase = purchase;
  l.sale = sale;
  l.src_category = purchase.category;
  l.dst_category = sale.category;
  l.level = level;
  return l;
}

// Distinct users who sold to `user`, sorted.
std::vector<UserId> sellers_of(const InteractionGraph& g, const UserId& user) {
  std::set<UserId> s;
  for (auto i : g.purchases_of(user)) s.insert(g.edges()[i].seller);
  return {s.begin(), s.end()};
}

std::vector<UserId> root_order(const InteractionGraph& g) {
  std::vector<UserId> roots;
  for (const auto& u : g.nodes()) {
    if (g.sales_of(u).empty()) roots.push_back(u);
  }
  for (const auto& u : g.nodes()) {
    if (!g.sales_of(u).empty()) roots.push_back(u);
  }
  return roots;
}

std::map<UserId, std::uint32_t, std::less<>> bfs_levels(const InteractionGraph& g) {
  std::map<UserId, std::uint32_t, std::less<>> level;
  for (const auto& root : root_order(g)) {
    if (level.contains(root)) continue;
    level[root] = 0;
    std::deque<UserId> queue{root};
    while (!queue.empty()) {
      const auto u = queue.front();
      queue.pop_front();
      for (const auto& s : sellers_of(g, u)) {
        if (level.contains(s)) continue;
        level[s] = level[u] + 1;
        queue.push_back(s);
      }
    }
  }
  return level;
}

// Purchases of `user` followed by at least one later sale.
std::size_t bought_then_sold(const InteractionGraph& g, const UserId& user,
                             const LinkOptions& options) {
  std::size_t w = 0;
  for (auto p : g.purchases_of(user)) {
    for (auto s : g.sales_of(user)) {
      if (chronological(g.edges()[p], g.edges()[s], options)) {
        ++w;
        break;
      }
    }
  }
  return w;
}

LinkDiscovery exhaustive_links(const InteractionGraph& g, const LinkOptions& options) {
  LinkDiscovery out;
  out.user_levels = bfs_levels(g);
  for (const auto& m : g.nodes()) {
    for (auto p : g.purchases_of(m)) {
      for (auto s : g.sales_of(m)) {
        const auto& pe = g.edges()[p];
        const auto& se = g.edges()[s];
        if (chronological(pe, se, options)) {
          out.links.push_back(make_link(pe, se, out.user_levels.at(se.buyer)));
        }
      }
    }
  }
  return out;
}

LinkDiscovery bfs_links(const InteractionGraph& g, const LinkOptions& options) {
  LinkDiscovery out;
  auto& level = out.user_levels;
  for (const auto& root : root_order(g)) {
    if (level.contains(root)) continue;
    level[root] = 0;
    std::vector<UserId> frontier{root};
    while (!frontier.empty()) {
      std::vector<UserId> next;
      for (const auto& ui : frontier) {
        for (const auto& uj : sellers_of(g, ui)) {
          if (level.contains(uj)) continue;
          level[uj] = level[ui] + 1;
          const auto w = bought_then_sold(g, uj, options);
          bool queued = false;
          for (const auto& uk : sellers_of(g, uj)) {
            if (level.contains(uk) || w == 0) continue;
            for (auto p : g.purchases_of(uj)) {
              const auto& pe = g.edges()[p];
              if (pe.seller != uk) continue;
              for (auto s : g.sales_of(uj)) {
                const auto& se = g.edges()[s];
                if (se.buyer == ui && chronological(pe, se, options)) {
                  out.links.push_back(make_link(pe, se, level[ui]));
                }
              }
            }
            if (!queued) {
              next.push_back(uj);
              queued = true;
            }
          }
        }
      }
      frontier = std::move(next);
    }
  }
  return out;
}

}  // namespace

LinkDiscovery find_links(const InteractionGraph& graph, const LinkOptions& options) {
  return options.traversal == Traversal::exhaustive ? exhaustive_links(graph, options)
                                                    : bfs_links(graph, options);
}

std::vector<SupplyChainLink> attenuate(std::vector<SupplyChainLink> links) {
  std::map<std::string_view, std::uint32_t> n;
  for (const auto& l : links) ++n[l.middle_user];
  std::vector<std::uint32_t> shares;
  shares.reserve(links.size());
  for (const auto& l : links) shares.push_back(n[l.middle_user]);
  for (std::size_t i = 0; i < links.size(); ++i) links[i].share_count = shares[i];
  return links;
}

std::map<UserId, Rational> weight_per_middle_user(std::span<const SupplyChainLink> links) {
  std::map<UserId, Rational> out;
  for (const auto& l : links) out[l.middle_user] += l.exact_weight();
  return out;
}

// ---------------------------------------------------------------------------
// Aggregation

SupplyChainGraph aggregate(std::span<const SupplyChainLink> links) {
  std::map<std::pair<ChainNode, ChainNode>, ChainEdge> edges;
  std::set<ChainNode> nodes;
  for (const auto& l : links) {
    if (l.share_count == 0) throw InvalidArgument("aggregate requires attenuated links");
    const ChainNode src{l.src_category, l.level + 1};
    const ChainNode dst{l.dst_category, l.level};
    auto& e = edges[{src, dst}];
    e.src = src;
    e.dst = dst;
    e.weight.add(l.share_count);
    e.link_ids.push_back(l.id);
    nodes.insert(src);
    nodes.insert(dst);
  }
  SupplyChainGraph g;
  g.nodes.assign(nodes.begin(), nodes.end());
  for (auto& [key, e] : edges) {
    std::sort(e.link_ids.begin(), e.link_ids.end());
    g.edges.push_back(std::move(e));
  }
  return g;
}

std::map<std::pair<ProductCategory, ProductCategory>, UnitFractionSum>
SupplyChainGraph::category_edges() const {
  std::map<std::pair<ProductCategory, ProductCategory>, UnitFractionSum> out;
  for (const auto& e : edges) out[{e.src.category, e.dst.category}] += e.weight;
  return out;
}

namespace {

json node_json(const ChainNode& n) {
  return {{"category", to_string(n.category)}, {"level", n.level}};
}

json weight_terms(const UnitFractionSum& w) {
  json t = json::object();
  for (const auto& [d, c] : w.counts()) t[std::to_string(d)] = c;
  return t;
}

}  // namespace

json SupplyChainGraph::to_json() const {
  json ns = json::array();
  for (const auto& n : nodes) ns.push_back(node_json(n));
  json es = json::array();
  for (const auto& e : edges) {
    es.push_back({{"src", node_json(e.src)},
                  {"dst", node_json(e.dst)},
                  {"weight", e.weight.value()},
                  {"weight_terms", weight_terms(e.weight)},
                  {"links", e.link_ids}});
  }
  return {{"format", "chainforge.supply_graph"}, {"version", 1}, {"nodes", ns}, {"edges", es}};
}

std::string SupplyChainGraph::to_dot() const {
  std::ostringstream out;
  out << "digraph supply_chain {\n  rankdir=LR;\n";
  auto name = [](const ChainNode& n) {
    return std::string(to_string(n.category)) + "_L" + std::to_string(n.level);
  };
  for (const auto& n : nodes) {
    out << "  \"" << name(n) << "\" [label=\"" << to_string(n.category) << "\\nlevel "
        << n.level << "\"];\n";
  }
  for (const auto& e : edges) {
    char w[32];
    std::snprintf(w, sizeof w, "%.6g", e.weight.value());
    out << "  \"" << name(e.src) << "\" -> \"" << name(e.dst) << "\" [weight=" << w
        << ", label=\"" << w << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

// ---------------------------------------------------------------------------

ValidationFilterResult filter_by_validation(
    std::span<const SupplyChainLink> links,
    const std::map<std::string, LinkValidationLabel, std::less<>>& labels) {
  ValidationFilterResult out;
  for (const auto& l : links) {
    auto it = labels.find(l.id);
    if (it == labels.end()) {
      ++out.unlabeled;
    } else if (is_relevant(it->second)) {
      out.links.push_back(l);
    } else {
      ++out.rejected;
    }
  }
  return out;
}

std::vector<SupplyChainLink> sample_links(std::span<const SupplyChainLink> links,
                                          std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> idx(links.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  if (count < idx.size()) {
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(idx));
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
  }
  std::vector<SupplyChainLink> out;
  out.reserve(idx.size());
  for (auto i : idx) {
    out.push_back(links[i]);
    out.back().share_count = 0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

json to_json(const SupplyChainLink& l) {
  return {{"id", l.id},
          {"middle_user", l.middle_user},
          {"src_category", to_string(l.src_category)},
          {"dst_category", to_string(l.dst_category)},
          {"level", l.level},
          {"share_count", l.share_count},
          {"weight", l.weight()},
          {"purchase", to_json(l.purchase)},
          {"sale", to_json(l.sale)}};
}

SupplyChainLink link_from_json(const json& j) {
  SupplyChainLink l;
  l.purchase = edge_from_json(j.at("purchase"));
  l.sale = edge_from_json(j.at("sale"));
  l.id = j.value("id", make_link_id(l.purchase, l.sale));
  l.middle_user = j.value("middle_user", l.purchase.buyer);
  if (l.purchase.buyer != l.middle_user || l.sale.seller != l.middle_user) {
    throw SchemaError("link " + l.id + ": edges do not meet at the middle user");
  }
  l.src_category = l.purchase.category;
  l.dst_category = l.sale.category;
  l.level = j.value("level", 0u);
  l.share_count = j.value("share_count", 0u);
  return l;
}

void write_links_jsonl(std::span<const SupplyChainLink> links, Traversal traversal,
                       std::ostream& out) {
  out << json{{"format", "chainforge.links"}, {"version", 1}, {"traversal", to_string(traversal)}}.dump()
      << '\n';
  for (const auto& l : links) out << to_json(l).dump() << '\n';
}

void write_links_jsonl(std::span<const SupplyChainLink> links, Traversal traversal,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write links file: " + path);
  write_links_jsonl(links, traversal, out);
}

std::vector<SupplyChainLink> read_links_jsonl(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("links file is empty");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("links header: ") + e.what());
  }
  if (header.value("format", "") != "chainforge.links") throw SchemaError("not a links file");
  if (header.value("version", 0) != 1) throw SchemaError("unsupported links file version");
  std::vector<SupplyChainLink> links;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      links.push_back(link_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw SchemaError("links line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return links;
}

std::vector<SupplyChainLink> read_links_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open links file: " + path);
  return read_links_jsonl(in);
}

}  // namespace chainforge
