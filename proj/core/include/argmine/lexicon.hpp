#pragma once

#include <regex>
#include <string>
#include <unordered_map>
#include <vector>

namespace argmine {

// A scored word/phrase list. Multi-word entries are tokenized with the same
// tokenizer as sentences and matched greedily left-to-right on the token
// stream; overlapping matches consume tokens once.
class PhraseLexicon {
 public:
  PhraseLexicon() = default;
  explicit PhraseLexicon(std::string name) : name_(std::move(name)) {}

  void add(const std::string& entry, double score);

  // entry<TAB>score, one per line; '#' comments allowed. A missing score
  // column defaults to default_score.
  static PhraseLexicon load_tsv(const std::string& path,
                                const std::string& name,
                                double default_score = 1.0);

  // Standardize entry scores to mean 0, population SD 1 (concreteness,
  // arousal, dominance lexicons).
  void standardize();

  // Scores of matched entries, in match order.
  std::vector<double> match_scores(const std::vector<std::string>& tokens) const;

  bool any_match(const std::vector<std::string>& tokens) const {
    return !match_scores(tokens).empty();
  }

  bool empty() const { return first_token_.empty(); }
  std::size_t size() const { return n_entries_; }
  const std::string& name() const { return name_; }
  double mean_score() const;  // over entries

 private:
  struct Entry {
    std::vector<std::string> tokens;
    double score = 1.0;
  };
  std::string name_;
  // first token -> entries, longest first
  std::unordered_map<std::string, std::vector<Entry>> first_token_;
  std::size_t n_entries_ = 0;
};

// One regular expression per line, matched against the lowercased sentence
// text (std::regex, ECMAScript grammar).
class RegexLexicon {
 public:
  RegexLexicon() = default;
  explicit RegexLexicon(std::string name) : name_(std::move(name)) {}

  void add(const std::string& pattern);
  static RegexLexicon load(const std::string& path, const std::string& name);

  bool any_match(const std::string& lowercased_text) const;
  bool empty() const { return patterns_.empty(); }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::vector<std::regex> patterns_;
  std::vector<std::string> sources_;
};

// Word set membership (one word per line).
std::vector<std::string> load_word_list(const std::string& path);

}  // namespace argmine
