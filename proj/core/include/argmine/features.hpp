#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "argmine/lexicon.hpp"

namespace argmine {

// ---------------------------------------------------------------------------
// Proposition types: 13 binary flags.

inline constexpr int kNumPropositionFeatures = 13;

enum PropositionFeature : int {
  kQuestionConfusion = 0,
  kQuestionWhyHow,
  kQuestionOther,
  kNormative,
  kPrediction,
  kHypothetical,
  kCitation,
  kComparison,
  kExample,
  kDefinition,
  kPersonalStory,
  kUseOfYou,
  kUseOfWe,
};

const std::array<std::string, kNumPropositionFeatures>& proposition_names();

// Pattern bundle behind the 13 flags; loaded from a lexicon directory with
// fixed file names (missing files are fatal).
struct PropositionLexicons {
  RegexLexicon question_confusion;
  RegexLexicon question_why_how;
  RegexLexicon question_other;
  PhraseLexicon normative;
  RegexLexicon prediction_regex;
  PhraseLexicon prediction_words;
  RegexLexicon hypothetical;
  RegexLexicon citation;
  PhraseLexicon comparison;
  RegexLexicon example;
  PhraseLexicon definition;
  std::unordered_map<std::string, bool> epistemic_verbs;
  std::unordered_map<std::string, bool> epistemic_nouns;
  PhraseLexicon use_of_you;

  static PropositionLexicons load(const std::string& lexicon_dir);
};

std::array<bool, kNumPropositionFeatures> proposition_features(
    const std::string& sentence_text, const std::vector<std::string>& tokens,
    const PropositionLexicons& lex);

// ---------------------------------------------------------------------------
// Tone: 8 real-valued slots plus the nominal sentiment category.

inline constexpr int kNumToneFeatures = 8;

enum ToneFeature : int {
  kSubjectivity = 0,   // mean matched-word score
  kConcreteness,       // sum of standardized scores
  kQualification,      // mean of +-1 qualifier/generality matches
  kHedging,            // sum of downtoner(+1)/booster(-1) matches
  kSentimentScore,     // [-1, +1]
  kSentimentCategory,  // -1 negative, 0 neutral, +1 positive
  kArousal,            // sum of standardized scores
  kDominance,          // sum of standardized scores
};

const std::array<std::string, kNumToneFeatures>& tone_names();

enum class SentimentCategory { negative, neutral, positive };

struct ToneLexicons {
  PhraseLexicon subjectivity;   // weaksubj=0.5, strongsubj=1
  PhraseLexicon concreteness;   // standardized at load
  PhraseLexicon qualifiers;     // qualifiers +1, generality words -1
  PhraseLexicon hedges;         // downtoners +1, boosters -1
  PhraseLexicon arousal;        // standardized at load
  PhraseLexicon dominance;      // standardized at load
  PhraseLexicon polarity;       // signed word polarity for the default scorer

  struct Paths {
    std::string subjectivity;
    std::string concreteness;
    std::string arousal;
    std::string dominance;
    std::string polarity;
  };
  // Qualifier/hedge lists ship with the lexicon directory; the third-party
  // lexicons come from user-supplied TSV paths (word<TAB>score).
  static ToneLexicons load(const std::string& lexicon_dir, const Paths& paths);
};

// A sentiment scorer maps tokens to (score in [-1, 1], category). The default
// is lexicon-based; an external scorer (e.g. a neural model run offline) can
// be plugged in behind the same signature.
using SentimentScorer =
    std::function<std::pair<double, SentimentCategory>(const std::vector<std::string>&)>;

std::pair<double, SentimentCategory> default_sentiment(
    const std::vector<std::string>& tokens, const PhraseLexicon& polarity);

struct ToneResult {
  std::array<double, kNumToneFeatures> values{};
  SentimentCategory category = SentimentCategory::neutral;
};

ToneResult tone_features(const std::vector<std::string>& tokens,
                         const ToneLexicons& lex,
                         const SentimentScorer& sentiment);

// ---------------------------------------------------------------------------
// TFIDF n-grams (n = 1, 2, 3).

struct NgramVocabulary {
  std::unordered_map<std::string, int> index;  // "a_b" -> column
  std::vector<std::string> ngrams;             // column -> n-gram
  std::vector<int> document_frequency;
  std::vector<double> idf;  // ln((1+D)/(1+df)) + 1
  int total_documents = 0;
  int min_df = 1;
  int max_order = 3;
  std::string fitted_on;  // split id, e.g. "train"

  std::string serialize() const;
  static NgramVocabulary deserialize(const std::string& json_text);
};

// Vocabulary over the training sentences only; n-grams below min_df dropped.
NgramVocabulary fit_ngram_vocab(
    const std::vector<std::vector<std::string>>& train_sentences, int max_order,
    int min_df, const std::string& fitted_on = "train");

// Sparse TFIDF weights (column, weight), L2-normalized per sentence;
// out-of-vocabulary n-grams are dropped. Sorted by column.
std::vector<std::pair<int, double>> tfidf(const std::vector<std::string>& tokens,
                                          const NgramVocabulary& vocab);

// n-grams of the given orders, words joined by '_'.
std::vector<std::string> extract_ngrams(const std::vector<std::string>& tokens,
                                        int max_order);

// ---------------------------------------------------------------------------
// Assembled per-sentence feature vector.

struct FeatureVector {
  std::string sentence_key;  // "<post_id>:<index>"
  std::array<bool, kNumPropositionFeatures> propositions{};
  std::array<double, kNumToneFeatures> tone{};
  double knowledge_frequency = 0.0;
  double knowledge_attractiveness = 0.0;
  double knowledge_extremeness = 0.0;
  int topic = 0;  // sentence-LDA topic, K = unknown
  std::vector<std::pair<int, double>> ngram_tfidf;
  int domain = -1;
};

}  // namespace argmine
