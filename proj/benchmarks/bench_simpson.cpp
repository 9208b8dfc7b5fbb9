#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "simpson/bleu.hpp"
#include "simpson/oracle.hpp"

namespace {

using namespace simpson;

void BM_ExhaustiveVerify(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::vector<double> grid{1.0, 0.5, 2.0, -0.25};
  for (auto _ : state) {
    auto summary = exhaustive_verify(IdentityId::kT3, n, grid);
    benchmark::DoNotOptimize(summary.checked);
  }
}
BENCHMARK(BM_ExhaustiveVerify)->DenseRange(3, 6)->Unit(benchmark::kMicrosecond);

TokenSeq random_tokens(std::mt19937_64& rng, std::size_t length) {
  TokenSeq out;
  for (std::size_t i = 0; i < length; ++i) out.push_back("w" + std::to_string(rng() % 50));
  return out;
}

void BM_SentenceStats(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto length = static_cast<std::size_t>(state.range(0));
  const auto hyp = random_tokens(rng, length);
  const auto ref = random_tokens(rng, length);
  for (auto _ : state) benchmark::DoNotOptimize(sentence_stats(hyp, ref));
}
BENCHMARK(BM_SentenceStats)->RangeMultiplier(4)->Range(8, 512);

void BM_CorpusVersusAverage(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::vector<BleuCorpus::Pair> pairs;
  for (int i = 0; i < state.range(0); ++i) {
    pairs.push_back({random_tokens(rng, 25), random_tokens(rng, 25)});
  }
  for (auto _ : state) {
    const BleuCorpus corpus(pairs);
    benchmark::DoNotOptimize(corpus_bleu(corpus).value);
    benchmark::DoNotOptimize(bleu_average(corpus, SmoothingPolicy{}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CorpusVersusAverage)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ReversalSearch(benchmark::State& state) {
  const ReversalSearchBounds bounds{state.range(0), 2};
  for (auto _ : state) {
    std::size_t found = 0;
    for_each_simpson_reversal(MetricId::kPrecision, bounds, [&](const PartitionedComparison&) {
      ++found;
      return true;
    });
    benchmark::DoNotOptimize(found);
  }
}
BENCHMARK(BM_ReversalSearch)->Arg(3)->Arg(6)->Arg(9)->Unit(benchmark::kMillisecond);

void BM_Census(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto r = reversal_census(n, MetricId::kDsc, SmoothingGamma(0), SmoothingGamma(1));
    benchmark::DoNotOptimize(r.strict_reversals);
  }
}
BENCHMARK(BM_Census)->DenseRange(2, 4)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
