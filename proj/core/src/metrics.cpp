#include "argmine/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "argmine/errors.hpp"

namespace argmine {

RankingResult make_ranking(const std::string& post_id,
                           const std::vector<double>& scores,
                           const std::vector<std::uint8_t>& relevance) {
  if (scores.size() != relevance.size())
    throw ConfigError("make_ranking: size mismatch");
  RankingResult r;
  r.post_id = post_id;
  r.relevance = relevance;
  r.order.resize(scores.size());
  std::iota(r.order.begin(), r.order.end(), 0);
  std::stable_sort(r.order.begin(), r.order.end(), [&](int a, int b) {
    if (scores[static_cast<std::size_t>(a)] !=
        scores[static_cast<std::size_t>(b)])
      return scores[static_cast<std::size_t>(a)] >
             scores[static_cast<std::size_t>(b)];
    return a < b;
  });
  return r;
}

namespace {

void require_positive(const RankingResult& r, const char* what) {
  for (std::uint8_t rel : r.relevance) {
    if (rel) return;
  }
  throw ConfigError(std::string(what) + ": post '" + r.post_id +
                    "' has no positive sentence; filter upstream");
}

}  // namespace

double precision_at_1(const std::vector<RankingResult>& rankings) {
  if (rankings.empty()) throw ConfigError("precision_at_1: no rankings");
  double hits = 0.0;
  for (const auto& r : rankings) {
    require_positive(r, "precision_at_1");
    if (!r.order.empty() &&
        r.relevance[static_cast<std::size_t>(r.order[0])]) {
      hits += 1.0;
    }
  }
  return 100.0 * hits / static_cast<double>(rankings.size());
}

double any_at_3(const std::vector<RankingResult>& rankings) {
  if (rankings.empty()) throw ConfigError("any_at_3: no rankings");
  double hits = 0.0;
  for (const auto& r : rankings) {
    require_positive(r, "any_at_3");
    const std::size_t k = std::min<std::size_t>(3, r.order.size());
    for (std::size_t i = 0; i < k; ++i) {
      if (r.relevance[static_cast<std::size_t>(r.order[i])]) {
        hits += 1.0;
        break;
      }
    }
  }
  return 100.0 * hits / static_cast<double>(rankings.size());
}

double mean_average_precision(const std::vector<RankingResult>& rankings) {
  if (rankings.empty())
    throw ConfigError("mean_average_precision: no rankings");
  double total_ap = 0.0;
  for (const auto& r : rankings) {
    require_positive(r, "mean_average_precision");
    double relevant_seen = 0.0;
    double ap = 0.0;
    for (std::size_t i = 0; i < r.order.size(); ++i) {
      if (r.relevance[static_cast<std::size_t>(r.order[i])]) {
        relevant_seen += 1.0;
        ap += relevant_seen / static_cast<double>(i + 1);
      }
    }
    total_ap += ap / relevant_seen;
  }
  return 100.0 * total_ap / static_cast<double>(rankings.size());
}

double auc(const std::vector<double>& scores,
           const std::vector<std::uint8_t>& labels) {
  if (scores.size() != labels.size()) throw ConfigError("auc: size mismatch");
  std::size_t n_pos = 0, n_neg = 0;
  for (std::uint8_t y : labels) (y ? n_pos : n_neg) += 1;
  if (n_pos == 0 || n_neg == 0)
    throw ConfigError("auc: both classes must be present");

  // Midrank statistic: AUC = (R_pos - n_pos(n_pos+1)/2) / (n_pos * n_neg).
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]])
      ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]]) rank_sum_pos += midrank;
    }
    i = j + 1;
  }
  const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) *
                                      static_cast<double>(n_pos + 1);
  return 100.0 * u /
         (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

SystemSummary summarize_runs(const std::vector<MetricReport>& runs) {
  if (runs.empty()) throw ConfigError("summarize_runs: no runs");
  SystemSummary s;
  s.system = runs.front().system;
  s.runs = runs.size();
  auto mean_sd = [&](auto getter, double& mean, double& sd) {
    double sum = 0.0;
    for (const auto& r : runs) sum += getter(r);
    mean = sum / static_cast<double>(runs.size());
    double sq = 0.0;
    for (const auto& r : runs) sq += (getter(r) - mean) * (getter(r) - mean);
    sd = std::sqrt(sq / static_cast<double>(runs.size()));
  };
  mean_sd([](const MetricReport& r) { return r.p_at_1; }, s.p_at_1_mean,
          s.p_at_1_sd);
  mean_sd([](const MetricReport& r) { return r.a_at_3; }, s.a_at_3_mean,
          s.a_at_3_sd);
  mean_sd([](const MetricReport& r) { return r.map; }, s.map_mean, s.map_sd);
  mean_sd([](const MetricReport& r) { return r.auc; }, s.auc_mean, s.auc_sd);
  return s;
}

void check_same_posts(const std::vector<std::vector<MetricReport>>& runs) {
  std::uint64_t expected = 0;
  bool first = true;
  for (const auto& system : runs) {
    for (const auto& r : system) {
      if (first) {
        expected = r.post_set_hash;
        first = false;
      } else if (r.post_set_hash != expected) {
        throw ConfigError(
            "compare_systems: systems were evaluated on different post sets");
      }
    }
  }
}

std::string compare_systems(const std::vector<SystemSummary>& systems) {
  std::ostringstream os;
  os << std::left << std::setw(16) << "system" << std::right << std::setw(14)
     << "P@1" << std::setw(14) << "A@3" << std::setw(14) << "MAP"
     << std::setw(14) << "AUC" << "\n";
  os << std::string(72, '-') << "\n";
  auto cell = [](double mean, double sd) {
    std::ostringstream c;
    c << std::fixed << std::setprecision(1) << mean << "+-"
      << std::setprecision(1) << sd;
    return c.str();
  };
  for (const auto& s : systems) {
    os << std::left << std::setw(16) << s.system << std::right << std::setw(14)
       << cell(s.p_at_1_mean, s.p_at_1_sd) << std::setw(14)
       << cell(s.a_at_3_mean, s.a_at_3_sd) << std::setw(14)
       << cell(s.map_mean, s.map_sd) << std::setw(14)
       << cell(s.auc_mean, s.auc_sd) << "\n";
  }
  return os.str();
}

std::string metrics_to_csv(const std::vector<MetricReport>& reports) {
  std::ostringstream os;
  os << "system,seed,p_at_1,a_at_3,map,auc,n_posts,n_sentences\n";
  os.precision(6);
  for (const auto& r : reports) {
    os << r.system << ',' << r.seed << ',' << r.p_at_1 << ',' << r.a_at_3
       << ',' << r.map << ',' << r.auc << ',' << r.n_posts << ','
       << r.n_sentences << '\n';
  }
  return os.str();
}

}  // namespace argmine
