#include <benchmark/benchmark.h>

#include <random>

#include "attn/cascade.hpp"
#include "attn/falsehood.hpp"
#include "attn/metrics.hpp"
#include "attn/motifs.hpp"
#include "attn/synth.hpp"

namespace {

using namespace attn;

SynthOutput corpus(int groups, int trees, double planted) {
  SynthConfig c;
  c.seed = 99;
  c.n_groups = groups;
  c.cascades_per_group = parse_count_distribution(nlohmann::json(trees), "cascades_per_group");
  c.offspring = parse_count_distribution({{"poisson", 0.8}, {"max", 12}}, "offspring");
  c.max_depth = 0;
  c.n_users = 40;
  c.planted_falsehood_rate = planted;
  return generate(c);
}

void BM_BuildCascades(benchmark::State& state) {
  const auto out = corpus(static_cast<int>(state.range(0)), 100, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(build_all_cascades(out.messages));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(out.messages.size()));
}
BENCHMARK(BM_BuildCascades)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Virality(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<int> parent(static_cast<std::size_t>(state.range(0)), -1);
  for (std::size_t i = 1; i < parent.size(); ++i) parent[i] = static_cast<int>(rng() % i);
  for (auto _ : state) benchmark::DoNotOptimize(structural_virality(parent));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Virality)->RangeMultiplier(10)->Range(10, 100000)->Complexity();

void BM_Motifs(benchmark::State& state) {
  const auto strategy = state.range(0) == 0 ? MatchStrategy::fast : MatchStrategy::generic;
  const auto out = corpus(20, 100, 0.0);
  std::vector<UserGraph> graphs;
  for (const auto& c : build_all_cascades(out.messages)) graphs.push_back(user_graph(c));
  MotifOptions options;
  options.strategy = strategy;
  for (auto _ : state) {
    for (const auto& g : graphs) benchmark::DoNotOptimize(detect_motifs(g, options));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(graphs.size()));
  state.SetLabel(strategy == MatchStrategy::fast ? "fast" : "generic");
}
BENCHMARK(BM_Motifs)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MatchCorpus(benchmark::State& state) {
  const auto out = corpus(static_cast<int>(state.range(0)), 100, 0.05);
  const auto docs = collect_documents(out.messages, nullptr);
  const TextResources resources;
  for (auto _ : state) benchmark::DoNotOptimize(match_corpus(docs, out.factchecks, resources));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(docs.size()));
}
BENCHMARK(BM_MatchCorpus)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
