#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "argmine/labeling.hpp"  // StopwordSet

namespace argmine {

struct KnowledgeStatement {
  std::string id;
  std::string text;
  std::vector<std::string> content_types;  // distinct non-stopword tokens
  int pro_count = 0;   // responses with pro stance
  int con_count = 0;   // responses with con stance

  int responses() const { return pro_count + con_count; }
};

class KialoIndex {
 public:
  // kialo.json: array of trees {id, text, stance, children: [...]}.
  // Response counts come from direct children; duplicate ids are fatal.
  static KialoIndex build(const std::string& json_text,
                          const StopwordSet& stopwords);
  static KialoIndex load(const std::string& path, const StopwordSet& stopwords);

  const std::vector<KnowledgeStatement>& statements() const {
    return statements_;
  }
  const std::vector<int>* postings(const std::string& token) const;

 private:
  std::vector<KnowledgeStatement> statements_;
  std::unordered_map<std::string, std::vector<int>> postings_;
};

struct KnowledgeMatch {
  int statement = 0;  // index into KialoIndex::statements()
  int shared_words = 0;
};

struct KnowledgeMatchSet {
  std::string sentence_key;
  std::vector<KnowledgeMatch> matches;

  int n() const { return static_cast<int>(matches.size()); }
};

// Statements sharing at least `min_common` distinct non-stopword word types
// with the sentence.
KnowledgeMatchSet retrieve(const std::vector<std::string>& sentence_tokens,
                           const KialoIndex& index,
                           const StopwordSet& stopwords, int min_common = 5);

// log2(N + 1) where N is the number of retrieved statements.
double frequency_feature(const KnowledgeMatchSet& matches);

// log2(M + 1) where M is the mean response count over matches; 0 when N = 0.
double attractiveness_feature(const KnowledgeMatchSet& matches,
                              const KialoIndex& index);

// Mean |P_i - N_i| of pro/con response proportions over matches, in [0, 1];
// statements with no responses contribute 0; 0 when N = 0.
double extremeness_feature(const KnowledgeMatchSet& matches,
                           const KialoIndex& index);

}  // namespace argmine
