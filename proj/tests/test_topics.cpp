#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "argmine/errors.hpp"
#include "argmine/lda.hpp"

using namespace argmine;

namespace {

// Two disjoint vocabularies; documents draw from exactly one.
std::vector<TokenizedDoc> two_cluster_docs(int n_docs, int doc_len,
                                           std::mt19937& rng,
                                           std::vector<int>* truth = nullptr) {
  std::vector<TokenizedDoc> docs;
  for (int d = 0; d < n_docs; ++d) {
    const int cluster = d % 2;
    if (truth) truth->push_back(cluster);
    std::vector<std::string> sentence;
    for (int w = 0; w < doc_len; ++w) {
      sentence.push_back((cluster ? "b" : "a") + std::to_string(rng() % 20));
    }
    TokenizedDoc doc;
    // split tokens into sentences of 6
    for (std::size_t i = 0; i < sentence.size(); i += 6) {
      doc.emplace_back(sentence.begin() + static_cast<std::ptrdiff_t>(i),
                       sentence.begin() + static_cast<std::ptrdiff_t>(
                                              std::min(i + 6, sentence.size())));
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

LdaConfig quick_config(int topics, LdaMode mode, std::uint64_t seed = 17) {
  LdaConfig cfg;
  cfg.topics = topics;
  cfg.iterations = 150;
  cfg.seed = seed;
  cfg.mode = mode;
  return cfg;
}

// Majority-vote purity of documents against the generating cluster.
double document_purity(const TopicModel& model,
                       const std::vector<TokenizedDoc>& docs,
                       const std::vector<int>& truth) {
  // assign each doc its argmax fold-in topic
  std::vector<int> assigned;
  for (const auto& doc : docs) {
    const auto theta = infer_theta(model, doc);
    assigned.push_back(static_cast<int>(
        std::max_element(theta.begin(), theta.end()) - theta.begin()));
  }
  // best of the two cluster->topic mappings (K = 2)
  int agree_identity = 0, agree_swapped = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (assigned[i] == truth[i]) ++agree_identity;
    if (assigned[i] == 1 - truth[i]) ++agree_swapped;
  }
  return static_cast<double>(std::max(agree_identity, agree_swapped)) /
         static_cast<double>(truth.size());
}

}  // namespace

TEST_CASE("K must be at least 2") {
  std::mt19937 rng(3);
  const auto docs = two_cluster_docs(10, 12, rng);
  CHECK_THROWS_AS(train_lda(docs, quick_config(1, LdaMode::document)),
                  ConfigError);
}

TEST_CASE("empty corpus / empty vocabulary are errors") {
  CHECK_THROWS_AS(train_lda({}, quick_config(2, LdaMode::document)),
                  DataError);
  std::vector<TokenizedDoc> empty_docs = {TokenizedDoc{}};
  CHECK_THROWS_AS(train_lda(empty_docs, quick_config(2, LdaMode::document)),
                  DataError);
}

TEST_CASE("same seed gives identical model bytes") {
  std::mt19937 rng(5);
  const auto docs = two_cluster_docs(40, 18, rng);
  const auto m1 = train_lda(docs, quick_config(3, LdaMode::document, 7));
  const auto m2 = train_lda(docs, quick_config(3, LdaMode::document, 7));
  CHECK(m1.serialize() == m2.serialize());
  const auto m3 = train_lda(docs, quick_config(3, LdaMode::document, 8));
  CHECK(m1.serialize() != m3.serialize());
}

TEST_CASE("model serialization round-trips") {
  std::mt19937 rng(5);
  const auto docs = two_cluster_docs(20, 12, rng);
  const auto model = train_lda(docs, quick_config(2, LdaMode::sentence, 7));
  const auto back = TopicModel::deserialize(model.serialize());
  CHECK(back.serialize() == model.serialize());
  CHECK(back.vocab.size() == model.vocab.size());
}

TEST_CASE("synthetic two-vocabulary corpus separates with purity >= 0.95") {
  std::mt19937 rng(11);
  std::vector<int> truth;
  const auto docs = two_cluster_docs(200, 30, rng, &truth);
  const auto model = train_lda(docs, quick_config(2, LdaMode::document, 13));
  CHECK(document_purity(model, docs, truth) >= 0.95);
}

TEST_CASE("count bookkeeping holds after every sweep") {
  std::mt19937 rng(23);
  const auto docs = two_cluster_docs(30, 20, rng);
  auto check_counts = [](int, const TopicModel& m) {
    std::int64_t total = 0;
    for (const auto& row : m.topic_word_counts) {
      for (auto c : row) {
        REQUIRE(c >= 0);
        total += c;
      }
    }
    REQUIRE(total == m.total_tokens);
    std::int64_t by_topic = 0;
    for (auto c : m.topic_counts) by_topic += c;
    REQUIRE(by_topic == m.total_tokens);
  };
  LdaConfig cfg = quick_config(4, LdaMode::document);
  cfg.iterations = 20;
  train_lda(docs, cfg, check_counts);

  cfg.mode = LdaMode::sentence;
  train_lda(docs, cfg, [](int, const TopicModel& m) {
    std::int64_t total = 0;
    for (const auto& row : m.topic_word_counts) {
      for (auto c : row) total += c;
    }
    REQUIRE(total == m.total_tokens);
  });
}

TEST_CASE("perplexity basics") {
  std::vector<TokenizedDoc> train_docs;
  for (int i = 0; i < 8; ++i) {
    train_docs.push_back({{"only", "word", "here"}});
  }
  const auto model = train_lda(train_docs, quick_config(2, LdaMode::document));
  SUBCASE("at least 1 on any document") {
    CHECK(perplexity(model, {{{"only"}}}) >= 1.0);
  }
  SUBCASE("empty held-out set is an error") {
    CHECK_THROWS_AS(perplexity(model, {}), DataError);
  }
}

TEST_CASE("matching K beats a too-small K on synthetic data") {
  // four disjoint vocabularies
  std::mt19937 rng(31);
  std::vector<TokenizedDoc> docs;
  for (int d = 0; d < 160; ++d) {
    const char prefix = static_cast<char>('a' + d % 4);
    std::vector<std::string> sentence;
    for (int w = 0; w < 24; ++w) {
      sentence.push_back(prefix + std::to_string(rng() % 15));
    }
    docs.push_back({sentence});
  }
  std::vector<TokenizedDoc> train_docs(docs.begin(), docs.begin() + 120);
  std::vector<TokenizedDoc> held_out(docs.begin() + 120, docs.end());
  const auto matched = train_lda(train_docs, quick_config(4, LdaMode::document));
  const auto mismatched =
      train_lda(train_docs, quick_config(2, LdaMode::document));
  CHECK(perplexity(matched, held_out) < perplexity(mismatched, held_out));
}

TEST_CASE("standard scores have mean 0 and sd 1 per topic") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> theta(50, std::vector<double>(4));
  for (auto& row : theta) {
    double sum = 0.0;
    for (auto& v : row) {
      v = unit(rng) + 0.01;
      sum += v;
    }
    for (auto& v : row) v /= sum;
  }
  const auto z = standard_scores(theta);
  for (std::size_t k = 0; k < 4; ++k) {
    double mean = 0.0, var = 0.0;
    for (const auto& row : z) mean += row[k];
    mean /= static_cast<double>(z.size());
    for (const auto& row : z) var += (row[k] - mean) * (row[k] - mean);
    var /= static_cast<double>(z.size());
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
  }
}

TEST_CASE("domain assignment picks the dominant non-excluded topic") {
  std::mt19937 rng(51);
  std::vector<int> truth;
  const auto docs = two_cluster_docs(60, 24, rng, &truth);
  const auto model = train_lda(docs, quick_config(2, LdaMode::document, 3));

  SUBCASE("dominant topic wins") {
    const auto assignment = assign_domains(model, docs, {});
    // both domains must appear, consistently with the generating clusters
    int agree = 0, swapped = 0;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      REQUIRE(assignment.domain_of[i] >= 0);
      if (assignment.domain_of[i] == truth[i]) ++agree;
      if (assignment.domain_of[i] == 1 - truth[i]) ++swapped;
    }
    CHECK(std::max(agree, swapped) >= 57);  // 0.95 * 60
  }
  SUBCASE("all topics excluded -> none") {
    const auto assignment = assign_domains(model, docs, {0, 1});
    for (int d : assignment.domain_of) CHECK(d == -1);
  }
}

TEST_CASE("sentence mode: topic assignment") {
  std::mt19937 rng(61);
  // documents mixing both clusters at the sentence level
  std::vector<TokenizedDoc> docs;
  std::vector<std::vector<int>> truth(40);
  for (int d = 0; d < 40; ++d) {
    TokenizedDoc doc;
    for (int s = 0; s < 6; ++s) {
      const int cluster = static_cast<int>(rng() % 2);
      truth[static_cast<std::size_t>(d)].push_back(cluster);
      std::vector<std::string> sentence;
      for (int w = 0; w < 8; ++w) {
        sentence.push_back((cluster ? "b" : "a") + std::to_string(rng() % 20));
      }
      doc.push_back(std::move(sentence));
    }
    docs.push_back(std::move(doc));
  }
  const auto model = train_lda(docs, quick_config(2, LdaMode::sentence, 19));

  SUBCASE("assignment purity >= 0.95") {
    int n = 0, agree = 0, swapped = 0;
    for (std::size_t d = 0; d < docs.size(); ++d) {
      for (std::size_t s = 0; s < docs[d].size(); ++s) {
        const int topic = sentence_topic(model, docs[d][s]);
        ++n;
        if (topic == truth[d][s]) ++agree;
        if (topic == 1 - truth[d][s]) ++swapped;
      }
    }
    CHECK(static_cast<double>(std::max(agree, swapped)) /
              static_cast<double>(n) >=
          0.95);
  }
  SUBCASE("empty or out-of-vocabulary sentence -> unknown topic") {
    CHECK(sentence_topic(model, {}) == model.unknown_topic());
    CHECK(sentence_topic(model, {"zzz", "@@@"}) == model.unknown_topic());
  }
  SUBCASE("words exclusive to one cluster map to its topic") {
    const int t_a = sentence_topic(model, {"a1", "a2", "a3", "a4"});
    const int t_b = sentence_topic(model, {"b1", "b2", "b3", "b4"});
    CHECK(t_a != t_b);
  }
}
