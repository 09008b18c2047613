#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

namespace argmine {

// A document is a list of sentences; a sentence is a list of tokens.
using TokenizedDoc = std::vector<std::vector<std::string>>;

enum class LdaMode { document, sentence };

struct LdaConfig {
  int topics = 40;
  double alpha = 0.0;  // 0 -> 50 / K
  double beta = 0.01;
  int iterations = 1000;
  std::uint64_t seed = 0;
  LdaMode mode = LdaMode::document;

  double resolved_alpha() const {
    return alpha > 0.0 ? alpha : 50.0 / static_cast<double>(topics);
  }
};

struct TopicModel {
  LdaConfig config;
  std::unordered_map<std::string, int> vocab;  // token -> word id
  std::vector<std::string> words;              // word id -> token
  std::vector<std::vector<std::int64_t>> topic_word_counts;  // K x V
  std::vector<std::int64_t> topic_counts;                    // token totals
  std::vector<std::int64_t> topic_sentence_counts;  // sentence mode only
  std::int64_t total_tokens = 0;

  int num_topics() const { return config.topics; }
  int vocab_size() const { return static_cast<int>(words.size()); }
  // Reserved id for sentences with no in-vocabulary tokens.
  int unknown_topic() const { return config.topics; }

  double phi(int topic, int word) const;  // smoothed topic-word probability

  std::vector<std::pair<std::string, std::int64_t>> top_words(int topic,
                                                              int n) const;

  std::string serialize() const;  // versioned JSON, byte-stable
  static TopicModel deserialize(const std::string& json_text);
  void save(const std::string& path) const;
  static TopicModel load(const std::string& path);
};

// Per-sweep observer; tests use it to verify count bookkeeping.
using GibbsObserver = std::function<void(int iteration, const TopicModel&)>;

// Collapsed Gibbs sampling. Document mode samples one topic per token;
// sentence mode constrains all tokens of a sentence to one topic and samples
// the block conditional. Deterministic for a fixed seed.
TopicModel train_lda(const std::vector<TokenizedDoc>& docs,
                     const LdaConfig& config,
                     const GibbsObserver& observer = nullptr);

// Document-completion perplexity on held-out documents: topic mixtures are
// folded in against the trained topic-word counts (fixed-point EM, no RNG),
// out-of-vocabulary tokens are skipped. Lower is better.
double perplexity(const TopicModel& model, const std::vector<TokenizedDoc>& docs);

// Deterministic fold-in estimate of a document's topic proportions.
std::vector<double> infer_theta(const TopicModel& model,
                                const TokenizedDoc& doc);

struct DomainAssignment {
  // index parallel to the input documents; -1 when every topic is excluded
  std::vector<int> domain_of;
  std::vector<int> excluded_topic_ids;
};

// Per-topic standard scores of topic proportions across the given posts;
// each post's domain is the non-excluded topic with the highest score.
DomainAssignment assign_domains(const TopicModel& model,
                                const std::vector<TokenizedDoc>& docs,
                                const std::vector<int>& excluded_topics);

// Per-topic z-scores of the theta matrix (documents x topics); population
// standard deviation, constant columns map to 0.
std::vector<std::vector<double>> standard_scores(
    const std::vector<std::vector<double>>& theta);

// MAP topic of one sentence under the trained sentence model: argmax over
// topics of sentence-count prior times word likelihoods. Returns
// model.unknown_topic() when the sentence has no in-vocabulary tokens.
int sentence_topic(const TopicModel& model,
                   const std::vector<std::string>& tokens);

}  // namespace argmine
