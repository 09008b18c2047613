#include "argmine/lda.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "argmine/errors.hpp"

namespace argmine {

using nlohmann::json;

double TopicModel::phi(int topic, int word) const {
  const double beta = config.beta;
  const double denom = static_cast<double>(topic_counts[topic]) +
                       beta * static_cast<double>(vocab_size());
  return (static_cast<double>(topic_word_counts[topic][word]) + beta) / denom;
}

std::vector<std::pair<std::string, std::int64_t>> TopicModel::top_words(
    int topic, int n) const {
  std::vector<std::pair<std::string, std::int64_t>> out;
  std::vector<int> order(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (topic_word_counts[topic][a] != topic_word_counts[topic][b])
      return topic_word_counts[topic][a] > topic_word_counts[topic][b];
    return words[a] < words[b];
  });
  for (int i = 0; i < n && i < static_cast<int>(order.size()); ++i) {
    out.emplace_back(words[order[i]], topic_word_counts[topic][order[i]]);
  }
  return out;
}

namespace {

struct FlatCorpus {
  // word ids per document (document mode) or per sentence block.
  std::vector<std::vector<int>> doc_words;                 // doc -> word ids
  std::vector<std::vector<std::vector<int>>> doc_blocks;   // doc -> sentence -> ids
};

FlatCorpus flatten(const std::vector<TokenizedDoc>& docs, TopicModel& model) {
  FlatCorpus flat;
  flat.doc_words.resize(docs.size());
  flat.doc_blocks.resize(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& sentence : docs[d]) {
      std::vector<int> block;
      for (const auto& tok : sentence) {
        auto [it, inserted] =
            model.vocab.emplace(tok, static_cast<int>(model.words.size()));
        if (inserted) model.words.push_back(tok);
        block.push_back(it->second);
        flat.doc_words[d].push_back(it->second);
      }
      if (!block.empty()) flat.doc_blocks[d].push_back(std::move(block));
    }
  }
  return flat;
}

int sample_from_weights(const std::vector<double>& weights, double u) {
  double total = 0.0;
  for (double w : weights) total += w;
  double target = u * total;
  double acc = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    if (target <= acc) return static_cast<int>(k);
  }
  return static_cast<int>(weights.size()) - 1;
}

}  // namespace

TopicModel train_lda(const std::vector<TokenizedDoc>& docs,
                     const LdaConfig& config, const GibbsObserver& observer) {
  if (config.topics < 2) throw ConfigError("LDA requires at least 2 topics");
  if (docs.empty()) throw DataError("LDA: no documents");
  if (config.iterations < 1) throw ConfigError("LDA: iterations must be >= 1");

  TopicModel model;
  model.config = config;
  FlatCorpus flat = flatten(docs, model);
  const int K = config.topics;
  const int V = model.vocab_size();
  if (V == 0) throw DataError("LDA: empty vocabulary");

  const double alpha = config.resolved_alpha();
  const double beta = config.beta;

  model.topic_word_counts.assign(K, std::vector<std::int64_t>(V, 0));
  model.topic_counts.assign(K, 0);
  model.topic_sentence_counts.assign(K, 0);

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const std::size_t D = docs.size();
  std::vector<std::vector<std::int64_t>> doc_topic(D,
                                                   std::vector<std::int64_t>(K, 0));

  if (config.mode == LdaMode::document) {
    // One topic variable per token.
    std::vector<std::vector<int>> z(D);
    for (std::size_t d = 0; d < D; ++d) {
      z[d].resize(flat.doc_words[d].size());
      for (std::size_t i = 0; i < flat.doc_words[d].size(); ++i) {
        const int k = static_cast<int>(rng() % static_cast<std::uint64_t>(K));
        z[d][i] = k;
        const int w = flat.doc_words[d][i];
        ++model.topic_word_counts[k][w];
        ++model.topic_counts[k];
        ++doc_topic[d][k];
        ++model.total_tokens;
      }
    }

    std::vector<double> weights(K);
    const double vbeta = beta * static_cast<double>(V);
    for (int iter = 0; iter < config.iterations; ++iter) {
      for (std::size_t d = 0; d < D; ++d) {
        for (std::size_t i = 0; i < flat.doc_words[d].size(); ++i) {
          const int w = flat.doc_words[d][i];
          const int old_k = z[d][i];
          --model.topic_word_counts[old_k][w];
          --model.topic_counts[old_k];
          --doc_topic[d][old_k];
          for (int k = 0; k < K; ++k) {
            weights[k] =
                (static_cast<double>(model.topic_word_counts[k][w]) + beta) /
                (static_cast<double>(model.topic_counts[k]) + vbeta) *
                (static_cast<double>(doc_topic[d][k]) + alpha);
          }
          const int new_k = sample_from_weights(weights, unit(rng));
          z[d][i] = new_k;
          ++model.topic_word_counts[new_k][w];
          ++model.topic_counts[new_k];
          ++doc_topic[d][new_k];
        }
      }
      if (observer) observer(iter, model);
    }
  } else {
    // Sentence mode: all tokens of a sentence share one topic variable.
    std::vector<std::vector<int>> z(D);
    for (std::size_t d = 0; d < D; ++d) {
      z[d].resize(flat.doc_blocks[d].size());
      for (std::size_t s = 0; s < flat.doc_blocks[d].size(); ++s) {
        const int k = static_cast<int>(rng() % static_cast<std::uint64_t>(K));
        z[d][s] = k;
        for (int w : flat.doc_blocks[d][s]) {
          ++model.topic_word_counts[k][w];
          ++model.topic_counts[k];
          ++model.total_tokens;
        }
        ++doc_topic[d][k];
        ++model.topic_sentence_counts[k];
      }
    }

    std::vector<double> logw(K);
    std::vector<double> weights(K);
    std::vector<int> within_count;  // per position: earlier repeats of word
    std::unordered_map<int, int> within;
    const double vbeta = beta * static_cast<double>(V);
    for (int iter = 0; iter < config.iterations; ++iter) {
      for (std::size_t d = 0; d < D; ++d) {
        for (std::size_t s = 0; s < flat.doc_blocks[d].size(); ++s) {
          const auto& block = flat.doc_blocks[d][s];
          const int old_k = z[d][s];
          for (int w : block) {
            --model.topic_word_counts[old_k][w];
            --model.topic_counts[old_k];
          }
          --doc_topic[d][old_k];
          --model.topic_sentence_counts[old_k];

          // Blocked conditional: repeated words inside the block advance
          // their counts as the product unrolls. The repeat offsets do not
          // depend on the topic, so they are computed once per block.
          within.clear();
          within_count.resize(block.size());
          for (std::size_t j = 0; j < block.size(); ++j) {
            within_count[j] = within[block[j]]++;
          }
          for (int k = 0; k < K; ++k) {
            double lp =
                std::log(static_cast<double>(doc_topic[d][k]) + alpha);
            for (std::size_t j = 0; j < block.size(); ++j) {
              const int w = block[j];
              lp += std::log(
                  static_cast<double>(model.topic_word_counts[k][w]) + beta +
                  static_cast<double>(within_count[j]));
              lp -= std::log(static_cast<double>(model.topic_counts[k]) +
                             vbeta + static_cast<double>(j));
            }
            logw[k] = lp;
          }
          const double mx = *std::max_element(logw.begin(), logw.end());
          for (int k = 0; k < K; ++k) weights[k] = std::exp(logw[k] - mx);
          const int new_k = sample_from_weights(weights, unit(rng));

          z[d][s] = new_k;
          for (int w : block) {
            ++model.topic_word_counts[new_k][w];
            ++model.topic_counts[new_k];
          }
          ++doc_topic[d][new_k];
          ++model.topic_sentence_counts[new_k];
        }
      }
      if (observer) observer(iter, model);
    }
  }
  return model;
}

std::vector<double> infer_theta(const TopicModel& model,
                                const TokenizedDoc& doc) {
  const int K = model.num_topics();
  const double alpha = model.config.resolved_alpha();
  std::vector<int> words;
  for (const auto& sentence : doc) {
    for (const auto& tok : sentence) {
      auto it = model.vocab.find(tok);
      if (it != model.vocab.end()) words.push_back(it->second);
    }
  }
  std::vector<double> theta(K, 1.0 / static_cast<double>(K));
  if (words.empty()) return theta;

  std::vector<double> gamma_sum(K);
  for (int round = 0; round < 50; ++round) {
    std::fill(gamma_sum.begin(), gamma_sum.end(), 0.0);
    for (int w : words) {
      double z = 0.0;
      for (int k = 0; k < K; ++k) z += theta[k] * model.phi(k, w);
      if (z <= 0.0) continue;
      for (int k = 0; k < K; ++k)
        gamma_sum[k] += theta[k] * model.phi(k, w) / z;
    }
    const double denom =
        static_cast<double>(words.size()) + alpha * static_cast<double>(K);
    for (int k = 0; k < K; ++k) theta[k] = (gamma_sum[k] + alpha) / denom;
  }
  return theta;
}

double perplexity(const TopicModel& model,
                  const std::vector<TokenizedDoc>& docs) {
  if (docs.empty()) throw DataError("perplexity: empty held-out set");
  double log_lik = 0.0;
  std::int64_t tokens = 0;
  for (const auto& doc : docs) {
    const auto theta = infer_theta(model, doc);
    for (const auto& sentence : doc) {
      for (const auto& tok : sentence) {
        auto it = model.vocab.find(tok);
        if (it == model.vocab.end()) continue;
        double p = 0.0;
        for (int k = 0; k < model.num_topics(); ++k)
          p += theta[k] * model.phi(k, it->second);
        log_lik += std::log(p);
        ++tokens;
      }
    }
  }
  if (tokens == 0) throw DataError("perplexity: no in-vocabulary tokens");
  return std::exp(-log_lik / static_cast<double>(tokens));
}

std::vector<std::vector<double>> standard_scores(
    const std::vector<std::vector<double>>& theta) {
  if (theta.empty()) return {};
  const std::size_t n = theta.size();
  const std::size_t k = theta[0].size();
  std::vector<double> mean(k, 0.0), sd(k, 0.0);
  for (const auto& row : theta)
    for (std::size_t j = 0; j < k; ++j) mean[j] += row[j];
  for (std::size_t j = 0; j < k; ++j) mean[j] /= static_cast<double>(n);
  for (const auto& row : theta)
    for (std::size_t j = 0; j < k; ++j) {
      const double d = row[j] - mean[j];
      sd[j] += d * d;
    }
  for (std::size_t j = 0; j < k; ++j)
    sd[j] = std::sqrt(sd[j] / static_cast<double>(n));
  std::vector<std::vector<double>> z(n, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j)
      z[i][j] = sd[j] > 0.0 ? (theta[i][j] - mean[j]) / sd[j] : 0.0;
  return z;
}

DomainAssignment assign_domains(const TopicModel& model,
                                const std::vector<TokenizedDoc>& docs,
                                const std::vector<int>& excluded_topics) {
  DomainAssignment out;
  out.excluded_topic_ids = excluded_topics;
  std::sort(out.excluded_topic_ids.begin(), out.excluded_topic_ids.end());

  std::vector<std::vector<double>> theta;
  theta.reserve(docs.size());
  for (const auto& doc : docs) theta.push_back(infer_theta(model, doc));
  const auto z = standard_scores(theta);

  std::vector<bool> excluded(static_cast<std::size_t>(model.num_topics()),
                             false);
  for (int e : excluded_topics) {
    if (e >= 0 && e < model.num_topics())
      excluded[static_cast<std::size_t>(e)] = true;
  }

  out.domain_of.assign(docs.size(), -1);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    int best = -1;
    for (int k = 0; k < model.num_topics(); ++k) {
      if (excluded[static_cast<std::size_t>(k)]) continue;
      if (best < 0 || z[d][static_cast<std::size_t>(k)] >
                          z[d][static_cast<std::size_t>(best)]) {
        best = k;
      }
    }
    out.domain_of[d] = best;
  }
  return out;
}

int sentence_topic(const TopicModel& model,
                   const std::vector<std::string>& tokens) {
  std::vector<int> ids;
  for (const auto& tok : tokens) {
    auto it = model.vocab.find(tok);
    if (it != model.vocab.end()) ids.push_back(it->second);
  }
  if (ids.empty()) return model.unknown_topic();

  const double alpha = model.config.resolved_alpha();
  int best = 0;
  double best_lp = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < model.num_topics(); ++k) {
    const std::int64_t prior_count =
        model.topic_sentence_counts.empty()
            ? 0
            : model.topic_sentence_counts[static_cast<std::size_t>(k)];
    // Shared normalizer dropped; only the argmax matters.
    double lp = std::log(static_cast<double>(prior_count) + alpha);
    for (int w : ids) lp += std::log(model.phi(k, w));
    if (lp > best_lp) {
      best_lp = lp;
      best = k;
    }
  }
  return best;
}

std::string TopicModel::serialize() const {
  json j;
  j["format_version"] = 1;
  j["topics"] = config.topics;
  j["alpha"] = config.alpha;
  j["beta"] = config.beta;
  j["iterations"] = config.iterations;
  j["seed"] = config.seed;
  j["mode"] = config.mode == LdaMode::document ? "document" : "sentence";
  j["words"] = words;
  j["topic_word_counts"] = topic_word_counts;
  j["topic_counts"] = topic_counts;
  j["topic_sentence_counts"] = topic_sentence_counts;
  j["total_tokens"] = total_tokens;
  return j.dump() + "\n";
}

TopicModel TopicModel::deserialize(const std::string& json_text) {
  json j = json::parse(json_text);
  if (j.at("format_version").get<int>() != 1)
    throw DataError("topic model: unsupported format_version");
  TopicModel m;
  m.config.topics = j.at("topics").get<int>();
  m.config.alpha = j.at("alpha").get<double>();
  m.config.beta = j.at("beta").get<double>();
  m.config.iterations = j.at("iterations").get<int>();
  m.config.seed = j.at("seed").get<std::uint64_t>();
  m.config.mode = j.at("mode").get<std::string>() == "sentence"
                      ? LdaMode::sentence
                      : LdaMode::document;
  m.words = j.at("words").get<std::vector<std::string>>();
  for (std::size_t i = 0; i < m.words.size(); ++i)
    m.vocab[m.words[i]] = static_cast<int>(i);
  m.topic_word_counts =
      j.at("topic_word_counts").get<std::vector<std::vector<std::int64_t>>>();
  m.topic_counts = j.at("topic_counts").get<std::vector<std::int64_t>>();
  m.topic_sentence_counts =
      j.at("topic_sentence_counts").get<std::vector<std::int64_t>>();
  m.total_tokens = j.at("total_tokens").get<std::int64_t>();
  return m;
}

void TopicModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write topic model: " + path);
  out << serialize();
}

TopicModel TopicModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read topic model: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

}  // namespace argmine
