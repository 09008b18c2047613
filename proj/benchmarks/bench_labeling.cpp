#include <benchmark/benchmark.h>

#include <random>
#include <sstream>

#include "argmine/labeling.hpp"
#include "argmine/text.hpp"

namespace {

argmine::Post synthetic_post(int n_sentences, std::mt19937& rng) {
  static const char* nouns[] = {"engine", "harbor", "market", "bridge",
                                "garden", "statue", "tunnel", "lantern"};
  std::ostringstream body;
  for (int i = 0; i < n_sentences; ++i) {
    if (i) body << " ";
    body << "The " << nouns[rng() % 8] << " number " << i << " near the "
         << nouns[rng() % 8] << " was described at length in the report.";
  }
  argmine::Post post;
  post.id = "bench";
  post.body = body.str();
  int index = 0;
  for (const auto& span : argmine::segment_sentences(post.body)) {
    argmine::SentenceRecord rec;
    rec.post_id = post.id;
    rec.index = index++;
    rec.text = span.text;
    rec.begin = span.begin;
    rec.end = span.end;
    rec.tokens = argmine::tokenize(rec.text);
    post.sentences.push_back(std::move(rec));
  }
  return post;
}

void BM_MatchDirectQuote(benchmark::State& state) {
  std::mt19937 rng(42);
  const auto post = synthetic_post(static_cast<int>(state.range(0)), rng);
  // quote = a middle sentence with one typo
  std::string quote_text = post.sentences[post.sentences.size() / 2].text;
  quote_text[quote_text.size() / 2] = 'x';
  const argmine::Quote quote{"c1", quote_text, argmine::Quote::Kind::direct};
  for (auto _ : state) {
    auto m = argmine::match_direct_quote(quote, post);
    benchmark::DoNotOptimize(m);
  }
}
BENCHMARK(BM_MatchDirectQuote)->Arg(8)->Arg(32)->Arg(96);

void BM_ExtractQuotes(benchmark::State& state) {
  std::string body;
  for (int i = 0; i < 12; ++i) {
    body += i % 3 == 0 ? "> quoted line number " + std::to_string(i) + "\n"
                       : "reply text line " + std::to_string(i) + "\n";
  }
  for (auto _ : state) {
    auto quotes = argmine::extract_direct_quotes("c", body);
    benchmark::DoNotOptimize(quotes);
  }
}
BENCHMARK(BM_ExtractQuotes);

}  // namespace

BENCHMARK_MAIN();
