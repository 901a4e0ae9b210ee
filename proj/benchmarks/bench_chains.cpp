#include <benchmark/benchmark.h>

#include "chainforge/chains.hpp"
#include "chainforge/rng.hpp"

namespace {

// Random sales among `users` people, times spread over a year.
chainforge::InteractionGraph random_graph(std::size_t edges, std::size_t users) {
  chainforge::Rng rng(7);
  std::vector<chainforge::InteractionEdge> es;
  for (std::size_t i = 0; i < edges; ++i) {
    const auto s = rng.below(users);
    auto b = rng.below(users - 1);
    if (b >= s) ++b;
    chainforge::InteractionEdge e;
    e.seller = "u" + std::to_string(s);
    e.buyer = "u" + std::to_string(b);
    e.category = chainforge::kAllProductCategories[rng.below(13)];
    e.thread = "t" + std::to_string(i);
    e.sell_post = e.thread + "-p0";
    e.buy_reply = e.thread + "-r1";
    e.purchase_time = static_cast<chainforge::Timestamp>(rng.below(365 * 86400));
    e.sell_time = e.purchase_time;
    es.push_back(std::move(e));
  }
  return chainforge::InteractionGraph(chainforge::GraphMode::filtered, std::move(es));
}

void BM_FindLinks(benchmark::State& state, chainforge::Traversal t) {
  const auto edges = static_cast<std::size_t>(state.range(0));
  const auto g = random_graph(edges, edges / 4 + 2);
  std::size_t links = 0;
  for (auto _ : state) {
    auto d = chainforge::find_links(g, {t, std::nullopt});
    links = d.links.size();
    benchmark::DoNotOptimize(d);
  }
  state.counters["links"] = static_cast<double>(links);
}
BENCHMARK_CAPTURE(BM_FindLinks, exhaustive, chainforge::Traversal::exhaustive)
    ->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_FindLinks, bfs, chainforge::Traversal::bfs)
    ->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_AttenuateAggregate(benchmark::State& state) {
  const auto g = random_graph(5000, 1000);
  const auto links = chainforge::find_links(g).links;
  for (auto _ : state) {
    auto w = chainforge::attenuate(links);
    benchmark::DoNotOptimize(chainforge::aggregate(w));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(links.size()));
}
BENCHMARK(BM_AttenuateAggregate)->Unit(benchmark::kMillisecond);

}  // namespace
