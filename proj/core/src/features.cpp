#include "argmine/features.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "argmine/errors.hpp"
#include "argmine/text.hpp"

namespace argmine {

using nlohmann::json;

const std::array<std::string, kNumPropositionFeatures>& proposition_names() {
  static const std::array<std::string, kNumPropositionFeatures> names = {
      "question_confusion", "question_why_how", "question_other",
      "normative",          "prediction",       "hypothetical",
      "citation",           "comparison",       "example",
      "definition",         "personal_story",   "use_of_you",
      "use_of_we"};
  return names;
}

const std::array<std::string, kNumToneFeatures>& tone_names() {
  static const std::array<std::string, kNumToneFeatures> names = {
      "subjectivity", "concreteness",       "qualification", "hedging",
      "sentiment_score", "sentiment_category", "arousal",    "dominance"};
  return names;
}

PropositionLexicons PropositionLexicons::load(const std::string& dir) {
  PropositionLexicons lex;
  auto path = [&](const char* file) { return dir + "/" + file; };
  lex.question_confusion =
      RegexLexicon::load(path("question_confusion.regex"), "question_confusion");
  lex.question_why_how =
      RegexLexicon::load(path("question_why_how.regex"), "question_why_how");
  lex.question_other =
      RegexLexicon::load(path("question_other.regex"), "question_other");
  lex.normative = PhraseLexicon::load_tsv(path("normative.txt"), "normative");
  lex.prediction_regex =
      RegexLexicon::load(path("prediction.regex"), "prediction");
  lex.prediction_words =
      PhraseLexicon::load_tsv(path("prediction.txt"), "prediction");
  lex.hypothetical =
      RegexLexicon::load(path("hypothetical.regex"), "hypothetical");
  lex.citation = RegexLexicon::load(path("citation.regex"), "citation");
  lex.comparison = PhraseLexicon::load_tsv(path("comparison.txt"), "comparison");
  lex.example = RegexLexicon::load(path("example.regex"), "example");
  lex.definition = PhraseLexicon::load_tsv(path("definition.txt"), "definition");
  for (const auto& w : load_word_list(path("epistemic_verbs.txt")))
    lex.epistemic_verbs[w] = true;
  for (const auto& w : load_word_list(path("epistemic_nouns.txt")))
    lex.epistemic_nouns[w] = true;
  if (lex.epistemic_verbs.empty() || lex.epistemic_nouns.empty())
    throw DataError("personal-story lexicons are empty in " + dir);
  lex.use_of_you = PhraseLexicon::load_tsv(path("you.txt"), "use_of_you");
  return lex;
}

namespace {

bool is_word_token(const std::string& tok) {
  for (char c : tok) {
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) continue;
    if (c == '\'') continue;
    return false;
  }
  return !tok.empty();
}

// Shallow personal-story patterns: "i" followed within a 3-word window by a
// non-epistemic verb, or "my" followed within a 3-word window by nothing but
// non-epistemic nouns.
bool personal_story(const std::vector<std::string>& tokens,
                    const PropositionLexicons& lex) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] != "i" && tokens[i] != "my") continue;
    const bool subject_i = tokens[i] == "i";
    bool epistemic = false;
    bool any_word = false;
    int seen = 0;
    for (std::size_t j = i + 1; j < tokens.size() && seen < 3; ++j) {
      if (!is_word_token(tokens[j])) break;  // clause boundary
      ++seen;
      any_word = true;
      const auto& set = subject_i ? lex.epistemic_verbs : lex.epistemic_nouns;
      if (set.count(tokens[j])) {
        epistemic = true;
        break;
      }
    }
    if (any_word && !epistemic) return true;
  }
  return false;
}

// "we" anywhere, or "us"/"our"/"ours" not directly preceded by "the"
// (keeps country references like "the us" out).
bool use_of_we(const std::vector<std::string>& tokens) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (t == "we") return true;
    if (t == "us" || t == "our" || t == "ours") {
      if (i == 0 || tokens[i - 1] != "the") return true;
    }
  }
  return false;
}

}  // namespace

namespace {

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out.append(t);
  }
  return out;
}

}  // namespace

std::array<bool, kNumPropositionFeatures> proposition_features(
    const std::string& sentence_text, const std::vector<std::string>& tokens,
    const PropositionLexicons& lex) {
  std::array<bool, kNumPropositionFeatures> out{};
  // Patterns are checked on two lowercased surfaces: the raw sentence (for
  // forms like "e.g." and "https:") and the space-joined token stream (for
  // contraction splits like "do n't").
  const std::string raw = normalize_for_match(sentence_text);
  const std::string joined = join_tokens(tokens);
  auto match = [&](const RegexLexicon& re) {
    return re.any_match(joined) || re.any_match(raw);
  };

  out[kQuestionConfusion] = match(lex.question_confusion);
  out[kQuestionWhyHow] = match(lex.question_why_how);
  out[kQuestionOther] = match(lex.question_other);
  out[kNormative] = lex.normative.any_match(tokens);
  out[kPrediction] =
      match(lex.prediction_regex) || lex.prediction_words.any_match(tokens);
  out[kHypothetical] = match(lex.hypothetical);
  out[kCitation] = match(lex.citation);
  out[kComparison] = lex.comparison.any_match(tokens);
  out[kExample] = match(lex.example);
  out[kDefinition] = lex.definition.any_match(tokens);
  out[kPersonalStory] = personal_story(tokens, lex);
  out[kUseOfYou] = lex.use_of_you.any_match(tokens);
  out[kUseOfWe] = use_of_we(tokens);
  return out;
}

ToneLexicons ToneLexicons::load(const std::string& lexicon_dir,
                                const Paths& paths) {
  ToneLexicons lex;
  lex.subjectivity =
      PhraseLexicon::load_tsv(paths.subjectivity, "subjectivity");
  lex.concreteness =
      PhraseLexicon::load_tsv(paths.concreteness, "concreteness");
  lex.concreteness.standardize();
  lex.qualifiers =
      PhraseLexicon::load_tsv(lexicon_dir + "/qualifiers.tsv", "qualifiers");
  lex.hedges = PhraseLexicon::load_tsv(lexicon_dir + "/hedges.tsv", "hedges");
  lex.arousal = PhraseLexicon::load_tsv(paths.arousal, "arousal");
  lex.arousal.standardize();
  lex.dominance = PhraseLexicon::load_tsv(paths.dominance, "dominance");
  lex.dominance.standardize();
  lex.polarity = PhraseLexicon::load_tsv(paths.polarity, "polarity");
  return lex;
}

std::pair<double, SentimentCategory> default_sentiment(
    const std::vector<std::string>& tokens, const PhraseLexicon& polarity) {
  double sum = 0.0;
  for (double s : polarity.match_scores(tokens)) sum += s;
  double score = sum / static_cast<double>(std::max<std::size_t>(1, tokens.size()));
  score = std::clamp(score, -1.0, 1.0);
  SentimentCategory cat = SentimentCategory::neutral;
  if (score > 0.1) cat = SentimentCategory::positive;
  if (score < -0.1) cat = SentimentCategory::negative;
  return {score, cat};
}

namespace {

double mean_or_zero(const std::vector<double>& scores) {
  if (scores.empty()) return 0.0;
  double sum = 0.0;
  for (double s : scores) sum += s;
  return sum / static_cast<double>(scores.size());
}

double sum_scores(const std::vector<double>& scores) {
  double sum = 0.0;
  for (double s : scores) sum += s;
  return sum;
}

}  // namespace

ToneResult tone_features(const std::vector<std::string>& tokens,
                         const ToneLexicons& lex,
                         const SentimentScorer& sentiment) {
  ToneResult r;
  r.values[kSubjectivity] = mean_or_zero(lex.subjectivity.match_scores(tokens));
  r.values[kConcreteness] = sum_scores(lex.concreteness.match_scores(tokens));
  r.values[kQualification] = mean_or_zero(lex.qualifiers.match_scores(tokens));
  r.values[kHedging] = sum_scores(lex.hedges.match_scores(tokens));
  const auto [score, cat] = sentiment(tokens);
  r.values[kSentimentScore] = score;
  r.category = cat;
  r.values[kSentimentCategory] = cat == SentimentCategory::positive  ? 1.0
                                 : cat == SentimentCategory::negative ? -1.0
                                                                      : 0.0;
  r.values[kArousal] = sum_scores(lex.arousal.match_scores(tokens));
  r.values[kDominance] = sum_scores(lex.dominance.match_scores(tokens));
  return r;
}

std::vector<std::string> extract_ngrams(const std::vector<std::string>& tokens,
                                        int max_order) {
  std::vector<std::string> out;
  for (int n = 1; n <= max_order; ++n) {
    if (static_cast<int>(tokens.size()) < n) break;
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size();
         ++i) {
      std::string gram = tokens[i];
      for (int j = 1; j < n; ++j) {
        gram.push_back('_');
        gram.append(tokens[i + static_cast<std::size_t>(j)]);
      }
      out.push_back(std::move(gram));
    }
  }
  return out;
}

NgramVocabulary fit_ngram_vocab(
    const std::vector<std::vector<std::string>>& train_sentences, int max_order,
    int min_df, const std::string& fitted_on) {
  if (train_sentences.empty())
    throw DataError("fit_ngram_vocab: empty training set");
  std::unordered_map<std::string, int> df;
  for (const auto& tokens : train_sentences) {
    auto grams = extract_ngrams(tokens, max_order);
    std::sort(grams.begin(), grams.end());
    grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
    for (auto& g : grams) ++df[g];
  }
  std::vector<std::string> kept;
  for (const auto& [gram, count] : df) {
    if (count >= min_df) kept.push_back(gram);
  }
  std::sort(kept.begin(), kept.end());

  NgramVocabulary vocab;
  vocab.total_documents = static_cast<int>(train_sentences.size());
  vocab.min_df = min_df;
  vocab.max_order = max_order;
  vocab.fitted_on = fitted_on;
  vocab.ngrams = std::move(kept);
  vocab.document_frequency.resize(vocab.ngrams.size());
  vocab.idf.resize(vocab.ngrams.size());
  const double d = static_cast<double>(vocab.total_documents);
  for (std::size_t i = 0; i < vocab.ngrams.size(); ++i) {
    vocab.index[vocab.ngrams[i]] = static_cast<int>(i);
    const int f = df[vocab.ngrams[i]];
    vocab.document_frequency[i] = f;
    vocab.idf[i] = std::log((1.0 + d) / (1.0 + static_cast<double>(f))) + 1.0;
  }
  return vocab;
}

std::vector<std::pair<int, double>> tfidf(const std::vector<std::string>& tokens,
                                          const NgramVocabulary& vocab) {
  std::unordered_map<int, double> tf;
  for (const auto& gram : extract_ngrams(tokens, vocab.max_order)) {
    auto it = vocab.index.find(gram);
    if (it != vocab.index.end()) tf[it->second] += 1.0;
  }
  std::vector<std::pair<int, double>> weights(tf.begin(), tf.end());
  double norm = 0.0;
  for (auto& [col, w] : weights) {
    w *= vocab.idf[static_cast<std::size_t>(col)];
    norm += w * w;
  }
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (auto& [col, w] : weights) w /= norm;
  }
  std::sort(weights.begin(), weights.end());
  return weights;
}

std::string NgramVocabulary::serialize() const {
  json j;
  j["format_version"] = 1;
  j["ngrams"] = ngrams;
  j["document_frequency"] = document_frequency;
  j["total_documents"] = total_documents;
  j["min_df"] = min_df;
  j["max_order"] = max_order;
  j["fitted_on"] = fitted_on;
  return j.dump() + "\n";
}

NgramVocabulary NgramVocabulary::deserialize(const std::string& json_text) {
  json j = json::parse(json_text);
  if (j.at("format_version").get<int>() != 1)
    throw DataError("ngram vocabulary: unsupported format_version");
  NgramVocabulary v;
  v.ngrams = j.at("ngrams").get<std::vector<std::string>>();
  v.document_frequency = j.at("document_frequency").get<std::vector<int>>();
  v.total_documents = j.at("total_documents").get<int>();
  v.min_df = j.at("min_df").get<int>();
  v.max_order = j.at("max_order").get<int>();
  v.fitted_on = j.at("fitted_on").get<std::string>();
  v.idf.resize(v.ngrams.size());
  const double d = static_cast<double>(v.total_documents);
  for (std::size_t i = 0; i < v.ngrams.size(); ++i) {
    v.index[v.ngrams[i]] = static_cast<int>(i);
    v.idf[i] =
        std::log((1.0 + d) / (1.0 + static_cast<double>(v.document_frequency[i]))) +
        1.0;
  }
  return v;
}

}  // namespace argmine
