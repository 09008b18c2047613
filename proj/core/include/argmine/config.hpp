#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace argmine {

// Plain key=value pipeline settings; '#' starts a comment. Unknown keys are
// rejected so typos surface early. parse(serialize(c)) == c.
struct PipelineConfig {
  // inputs
  std::string posts_path;
  std::string comments_path;
  std::string kialo_path;
  std::string lexicon_dir;
  std::string stopwords_path;
  std::string out_dir;

  // user-supplied tone lexicons (word<TAB>score)
  std::string subjectivity_lexicon;
  std::string concreteness_lexicon;
  std::string arousal_lexicon;
  std::string dominance_lexicon;
  std::string polarity_lexicon;

  // time-based splits
  std::int64_t train_end_utc = 0;
  std::int64_t val_end_utc = 0;
  std::int64_t test_end_utc = 0;

  // topics
  int domain_topics = 40;
  int sentence_topics = 50;
  double lda_alpha = 0.0;  // 0 -> 50/K
  double lda_beta = 0.01;
  int lda_iterations = 1000;
  std::uint64_t lda_seed = 0;
  std::vector<int> excluded_topics;

  // labeling thresholds
  int edit_budget = 2;
  double coverage = 0.8;
  int implicit_overlap = 4;
  int max_quotes = 3;

  // knowledge
  int knowledge_min_common = 5;

  // features
  int ngram_min_df = 5;
  int ngram_max_order = 3;

  // ranking
  std::string task = "attacked";  // or "successful"
  std::vector<double> grid_reg_weights = {1e-4, 1e-3, 1e-2, 1e-1};
  std::vector<std::uint64_t> run_seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};

  // report
  int report_max_posts = 50;

  int jobs = 0;  // 0 -> hardware concurrency

  static PipelineConfig parse(const std::string& text);
  static PipelineConfig load(const std::string& path);
  std::string serialize() const;
  void validate() const;  // throws ConfigError
};

}  // namespace argmine
