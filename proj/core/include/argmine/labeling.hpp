#pragma once

#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "argmine/corpus.hpp"

namespace argmine {

using StopwordSet = std::unordered_set<std::string>;

StopwordSet load_stopwords(const std::string& path);

struct Quote {
  std::string comment_id;
  std::string text;
  enum class Kind { direct, implicit } kind = Kind::direct;
};

struct QuoteMatch {
  Quote quote;
  int first_sentence = 0;  // contiguous span [first_sentence, last_sentence]
  int last_sentence = 0;
  int edit_distance = 0;
  double coverage = 0.0;   // fraction of quote characters matched, in [0, 1]
};

struct LabelingConfig {
  int edit_budget = 2;         // Levenshtein allowance for typos
  double min_coverage = 0.8;   // quote characters the span must cover
  int min_span_chars = 4;      // matched text must have >= 1 word, >= 4 chars
  int implicit_overlap = 4;    // shared non-stopword types for implicit quotes
  int max_quotes = 3;          // comments above this are excluded from success
  int max_span_sentences = 24; // search cap; quotes never span more in practice
};

struct SentenceEvidence {
  int sentence_index = 0;
  std::string comment_id;
  Quote::Kind kind = Quote::Kind::direct;
  int edit_distance = 0;
  double coverage = 0.0;
};

struct AttackLabeling {
  std::vector<bool> attacked;      // per sentence
  std::vector<Success> success;    // per sentence
  std::vector<SentenceEvidence> evidence;

  enum class ExclusionReason { new_sentence_attack, too_many_quotes };
  struct Exclusion {
    std::string comment_id;
    ExclusionReason reason;
  };
  std::vector<Exclusion> excluded;
};

const char* to_string(AttackLabeling::ExclusionReason r);

// Each maximal run of consecutive ">"-prefixed lines becomes one quote,
// with the prefix and surrounding whitespace stripped.
std::vector<Quote> extract_direct_quotes(const std::string& comment_id,
                                         const std::string& body);

// Aligns the quote against contiguous sentence spans of the post. A span is a
// candidate when the quote matches a substring of the span text within the
// edit budget (free end-gaps on the span side) and the aligned window reaches
// both the first and the last sentence of the span. The longest span wins,
// ties broken by earliest start. Accepted only if the matched window has at
// least one word and min_span_chars characters and the alignment covers at
// least min_coverage of the quote characters.
std::optional<QuoteMatch> match_direct_quote(const Quote& quote,
                                             const Post& post,
                                             const LabelingConfig& cfg = {});

// Post sentence indices whose distinct non-stopword token types occur at
// least `implicit_overlap` times in the given comment sentence.
std::vector<int> match_implicit(const std::vector<std::string>& comment_sentence_tokens,
                                const Post& post, const StopwordSet& stopwords,
                                const LabelingConfig& cfg = {});

// Attacked labels from top-level comments only (direct + implicit quotes).
AttackLabeling label_attacked(const Post& post,
                              const std::vector<const Comment*>& top_level,
                              const StopwordSet& stopwords,
                              const LabelingConfig& cfg = {});

// Success labels: an attacked sentence is successful iff some top-level
// comment that attacks it has a delta in its subtree, and that comment is not
// excluded. Exclusions: a challenger whose lower-level comments quote
// sentences the challenger itself did not attack, and comments with more
// than max_quotes direct quotes.
void label_success(const Post& post, const Corpus& corpus,
                   AttackLabeling& labeling, const StopwordSet& stopwords,
                   const LabelingConfig& cfg = {});

// Runs label_attacked + label_success for one post.
AttackLabeling label_post(const Post& post, const Corpus& corpus,
                          const StopwordSet& stopwords,
                          const LabelingConfig& cfg = {});

// Applies labeling to every post in place; returns per-post labelings in
// post order.
std::vector<AttackLabeling> label_corpus(Corpus& corpus,
                                         const StopwordSet& stopwords,
                                         const LabelingConfig& cfg = {},
                                         int jobs = 1);

struct DatasetMembership {
  std::vector<std::string> attacked_posts;    // >= 1 attacked sentence
  std::vector<std::string> successful_posts;  // >= 1 successful sentence
};

DatasetMembership build_datasets(const Corpus& corpus);

// labels.jsonl: one object per sentence with attack/success flags and
// match evidence.
std::string labels_to_jsonl(const Corpus& corpus,
                            const std::vector<AttackLabeling>& labelings);
void apply_labels_jsonl(Corpus& corpus, std::istream& jsonl);

}  // namespace argmine
