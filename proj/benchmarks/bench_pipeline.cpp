// Microbenchmarks for the hot paths: one similarity step, the full
// iteration, and query throughput. Corpora are synthesized once per size
// and shared across repetitions.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <map>
#include <utility>

#include "folksim/corpus.hpp"
#include "folksim/eval.hpp"
#include "folksim/mrs.hpp"
#include "folksim/search.hpp"

namespace {

using namespace folksim;

const TagResourceMatrix& corpus(std::int64_t n) {
  static std::map<std::int64_t, TagResourceMatrix> cache;
  const auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  SynthSpec spec;
  spec.n_users = static_cast<std::uint32_t>(n) / 2;
  spec.n_resources = static_cast<std::uint32_t>(n);
  spec.n_tags = static_cast<std::uint32_t>(n);
  spec.tags_min = 2;
  spec.tags_max = 3;
  spec.seed = 1;
  return cache.emplace(n, build_tag_resource_matrix(generate_synthetic(spec)))
      .first->second;
}

void BM_similarity_step(benchmark::State& state) {
  const auto& tr = corpus(state.range(0));
  const auto st = init_similarity(tr.n_t);
  const auto sr = init_similarity(tr.n_r);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mrs_step(tr, st, sr, 0.5));
  }
}
BENCHMARK(BM_similarity_step)->Arg(128)->Arg(256)->Arg(512);

void BM_full_iteration(benchmark::State& state) {
  const auto& tr = corpus(512);
  const EngineConfig cfg;
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_similarities(tr, cfg, threads));
  }
}
BENCHMARK(BM_full_iteration)->Arg(1)->Arg(2)->Arg(4)->UseRealTime();

void BM_query(benchmark::State& state) {
  const auto& tr = corpus(1024);
  std::uint32_t t = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rank_resources({t, t + 1}, 10, tr));
    t = (t + 2) % (tr.n_t - 1);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_query);

}  // namespace

BENCHMARK_MAIN();
