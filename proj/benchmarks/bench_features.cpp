#include <benchmark/benchmark.h>

#include <random>

#include "argmine/features.hpp"
#include "argmine/text.hpp"

#ifndef ARGMINE_RESOURCE_DIR
#define ARGMINE_RESOURCE_DIR "resources"
#endif

namespace {

const argmine::PropositionLexicons& prop_lexicons() {
  static const auto lex = argmine::PropositionLexicons::load(
      std::string(ARGMINE_RESOURCE_DIR) + "/lexicons");
  return lex;
}

void BM_PropositionFeatures(benchmark::State& state) {
  const std::string text =
      "Why should we accept that claim if the data was never published?";
  const auto tokens = argmine::tokenize(text);
  const auto& lex = prop_lexicons();
  for (auto _ : state) {
    auto flags = argmine::proposition_features(text, tokens, lex);
    benchmark::DoNotOptimize(flags);
  }
}
BENCHMARK(BM_PropositionFeatures);

void BM_Tfidf(benchmark::State& state) {
  std::mt19937 rng(5);
  std::vector<std::vector<std::string>> sentences;
  for (int i = 0; i < 2000; ++i) {
    std::vector<std::string> s;
    for (int w = 0; w < 12; ++w) s.push_back("w" + std::to_string(rng() % 400));
    sentences.push_back(std::move(s));
  }
  const auto vocab = argmine::fit_ngram_vocab(sentences, 3, 2);
  for (auto _ : state) {
    for (int i = 0; i < 100; ++i) {
      auto weights = argmine::tfidf(sentences[static_cast<std::size_t>(i)], vocab);
      benchmark::DoNotOptimize(weights);
    }
  }
}
BENCHMARK(BM_Tfidf);

}  // namespace

BENCHMARK_MAIN();
