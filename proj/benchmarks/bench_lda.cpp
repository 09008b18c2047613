#include <benchmark/benchmark.h>

#include <random>

#include "argmine/lda.hpp"

namespace {

std::vector<argmine::TokenizedDoc> synthetic_docs(int n_docs, int n_sentences,
                                                  int sentence_len, int vocab) {
  std::mt19937 rng(7);
  std::vector<argmine::TokenizedDoc> docs;
  for (int d = 0; d < n_docs; ++d) {
    argmine::TokenizedDoc doc;
    for (int s = 0; s < n_sentences; ++s) {
      std::vector<std::string> sentence;
      for (int w = 0; w < sentence_len; ++w) {
        sentence.push_back("w" + std::to_string(rng() % vocab));
      }
      doc.push_back(std::move(sentence));
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

void BM_GibbsDocumentMode(benchmark::State& state) {
  const auto docs = synthetic_docs(static_cast<int>(state.range(0)), 6, 10, 500);
  for (auto _ : state) {
    argmine::LdaConfig cfg;
    cfg.topics = 20;
    cfg.iterations = 5;
    cfg.seed = 3;
    auto model = argmine::train_lda(docs, cfg);
    benchmark::DoNotOptimize(model);
  }
}
BENCHMARK(BM_GibbsDocumentMode)->Arg(50)->Arg(200);

void BM_GibbsSentenceMode(benchmark::State& state) {
  const auto docs = synthetic_docs(static_cast<int>(state.range(0)), 6, 10, 500);
  for (auto _ : state) {
    argmine::LdaConfig cfg;
    cfg.topics = 20;
    cfg.iterations = 5;
    cfg.seed = 3;
    cfg.mode = argmine::LdaMode::sentence;
    auto model = argmine::train_lda(docs, cfg);
    benchmark::DoNotOptimize(model);
  }
}
BENCHMARK(BM_GibbsSentenceMode)->Arg(50)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
