#include <benchmark/benchmark.h>

#include "chainforge/featurize.hpp"
#include "chainforge/synth.hpp"

namespace {

std::vector<std::string> product_docs(std::size_t per_category) {
  auto cfg = chainforge::SynthConfig::defaults();
  cfg.docs_per_category = per_category;
  const auto s = chainforge::generate(cfg);
  std::vector<std::string> docs;
  for (const auto& p : s.corpus.posts())
    if (p.is_product_post()) docs.push_back(p.body);
  return docs;
}

void BM_TfidfFit(benchmark::State& state) {
  const auto docs = product_docs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(chainforge::TfidfModel::fit(docs));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(docs.size()));
}
BENCHMARK(BM_TfidfFit)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_TfidfTransform(benchmark::State& state) {
  const auto docs = product_docs(100);
  const auto model = chainforge::TfidfModel::fit(docs);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.transform(docs[i]));
    i = (i + 1) % docs.size();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_TfidfTransform);

}  // namespace
