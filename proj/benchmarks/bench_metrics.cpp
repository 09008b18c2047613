#include <benchmark/benchmark.h>

#include <random>

#include "argmine/metrics.hpp"

namespace {

void BM_AucRankStatistic(benchmark::State& state) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<double> scores(n);
  std::vector<std::uint8_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = unit(rng);
    labels[i] = rng() % 2;
  }
  labels[0] = 1;
  labels[1] = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(argmine::auc(scores, labels));
  }
}
BENCHMARK(BM_AucRankStatistic)->Arg(1000)->Arg(100000);

void BM_MeanAveragePrecision(benchmark::State& state) {
  std::mt19937 rng(13);
  std::vector<argmine::RankingResult> rankings;
  for (int p = 0; p < 500; ++p) {
    std::vector<double> scores(12);
    std::vector<std::uint8_t> rel(12);
    for (int i = 0; i < 12; ++i) {
      scores[static_cast<std::size_t>(i)] =
          static_cast<double>(rng() % 1000);
      rel[static_cast<std::size_t>(i)] = rng() % 3 == 0;
    }
    rel[rng() % 12] = 1;
    rankings.push_back(
        argmine::make_ranking("p" + std::to_string(p), scores, rel));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(argmine::mean_average_precision(rankings));
  }
}
BENCHMARK(BM_MeanAveragePrecision);

}  // namespace

BENCHMARK_MAIN();
