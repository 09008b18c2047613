#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace argmine {

struct RankingResult {
  std::string post_id;
  std::vector<int> order;               // sentence indices, best first
  std::vector<std::uint8_t> relevance;  // indexed by sentence index
};

// Descending score, ties broken by sentence index.
RankingResult make_ranking(const std::string& post_id,
                           const std::vector<double>& scores,
                           const std::vector<std::uint8_t>& relevance);

// Percentage of posts whose top-ranked sentence is relevant. Every post must
// contain at least one relevant sentence (filter upstream).
double precision_at_1(const std::vector<RankingResult>& rankings);

// Percentage of posts with a relevant sentence in the top 3 (short posts use
// all their sentences).
double any_at_3(const std::vector<RankingResult>& rankings);

// Mean average precision (percent): AP per post is the mean over relevant
// ranks r of (#relevant at <= r) / r.
double mean_average_precision(const std::vector<RankingResult>& rankings);

// Pooled ROC AUC (percent) by the rank statistic; ties get half credit.
// Raises ConfigError when the pool has a single class.
double auc(const std::vector<double>& scores,
           const std::vector<std::uint8_t>& labels);

struct MetricReport {
  std::string system;
  double p_at_1 = 0.0;
  double a_at_3 = 0.0;
  double map = 0.0;
  double auc = 0.0;
  std::size_t n_posts = 0;
  std::size_t n_sentences = 0;
  std::uint64_t seed = 0;
  std::uint64_t post_set_hash = 0;  // permits the same-posts check
};

struct SystemSummary {
  std::string system;
  double p_at_1_mean = 0.0, p_at_1_sd = 0.0;
  double a_at_3_mean = 0.0, a_at_3_sd = 0.0;
  double map_mean = 0.0, map_sd = 0.0;
  double auc_mean = 0.0, auc_sd = 0.0;
  std::size_t runs = 0;
};

SystemSummary summarize_runs(const std::vector<MetricReport>& runs);

// Side-by-side text table (mean +- sd over seeded runs). All systems must
// have been evaluated on the same posts.
std::string compare_systems(const std::vector<SystemSummary>& systems);
void check_same_posts(const std::vector<std::vector<MetricReport>>& runs);

std::string metrics_to_csv(const std::vector<MetricReport>& reports);

}  // namespace argmine
