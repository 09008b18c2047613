#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "argmine/errors.hpp"
#include "argmine/metrics.hpp"
#include "testutil.hpp"

using namespace argmine;

namespace {

RankingResult rank(const std::vector<double>& scores,
                   const std::vector<std::uint8_t>& rel,
                   const std::string& id = "p") {
  return make_ranking(id, scores, rel);
}

}  // namespace

TEST_CASE("precision at 1") {
  CHECK(precision_at_1({rank({0.9, 0.1, 0.5}, {1, 0, 0})}) ==
        doctest::Approx(100.0));
  CHECK(precision_at_1({rank({0.9, 0.1, 0.5}, {1, 0, 0}, "a"),
                        rank({0.9, 0.1, 0.5}, {0, 1, 0}, "b")}) ==
        doctest::Approx(50.0));
  SUBCASE("oracle ranker scores 100 everywhere") {
    std::mt19937 rng(5);
    std::vector<RankingResult> rankings;
    for (int p = 0; p < 50; ++p) {
      std::vector<std::uint8_t> rel(6, 0);
      rel[rng() % 6] = 1;
      std::vector<double> scores(6);
      for (int i = 0; i < 6; ++i) scores[static_cast<std::size_t>(i)] = rel[static_cast<std::size_t>(i)];
      rankings.push_back(rank(scores, rel, "p" + std::to_string(p)));
    }
    CHECK(precision_at_1(rankings) == doctest::Approx(100.0));
  }
  SUBCASE("a post without positives is an error") {
    CHECK_THROWS_AS(precision_at_1({rank({0.5, 0.4}, {0, 0})}), ConfigError);
  }
}

TEST_CASE("any at 3") {
  CHECK(any_at_3({rank({0.9, 0.8, 0.7, 0.1}, {0, 0, 1, 0})}) ==
        doctest::Approx(100.0));
  CHECK(any_at_3({rank({0.9, 0.8, 0.7, 0.6, 0.5, 0.4},
                       {0, 0, 0, 1, 0, 0})}) == doctest::Approx(0.0));
  SUBCASE("short posts use all sentences") {
    CHECK(any_at_3({rank({0.9, 0.1}, {0, 1})}) == doctest::Approx(100.0));
  }
}

TEST_CASE("mean average precision") {
  SUBCASE("relevance by rank (1,0,1) gives 83.33") {
    // AP = (1/1 + 2/3) / 2
    const double map = mean_average_precision(
        {rank({0.9, 0.5, 0.1}, {1, 0, 1})});
    CHECK(std::abs(map - 100.0 * (1.0 + 2.0 / 3.0) / 2.0) < 1e-9);
    CHECK(std::abs(map - 83.33) < 0.01);
  }
  SUBCASE("all relevant first -> 100") {
    CHECK(mean_average_precision({rank({0.9, 0.8, 0.1}, {1, 1, 0})}) ==
          doctest::Approx(100.0));
  }
  SUBCASE("single relevant at rank k -> 100/k") {
    for (int n : {3, 5, 8}) {
      for (int k = 1; k <= n; ++k) {
        std::vector<double> scores(static_cast<std::size_t>(n));
        std::vector<std::uint8_t> rel(static_cast<std::size_t>(n), 0);
        for (int i = 0; i < n; ++i)
          scores[static_cast<std::size_t>(i)] = static_cast<double>(n - i);
        rel[static_cast<std::size_t>(k - 1)] = 1;
        CHECK(mean_average_precision({rank(scores, rel)}) ==
              doctest::Approx(100.0 / k));
      }
    }
  }
}

TEST_CASE("auc") {
  SUBCASE("perfect separation -> 100") {
    CHECK(auc({0.8, 0.6, 0.4, 0.2}, {1, 1, 0, 0}) == doctest::Approx(100.0));
  }
  SUBCASE("interleaved labels -> 75") {
    // pairwise oracle: 3 of 4 pos-neg pairs ranked correctly, one tied? no:
    // pairs (0.8 vs 0.6)=1, (0.8 vs 0.2)=1, (0.4 vs 0.6)=0, (0.4 vs 0.2)=1
    CHECK(auc({0.8, 0.6, 0.4, 0.2}, {1, 0, 1, 0}) == doctest::Approx(75.0));
    CHECK(testutil::auc_pairwise({0.8, 0.6, 0.4, 0.2}, {1, 0, 1, 0}) ==
          doctest::Approx(75.0));
  }
  SUBCASE("one-class pool is an error") {
    CHECK_THROWS_AS(auc({0.5, 0.4}, {1, 1}), ConfigError);
    CHECK_THROWS_AS(auc({0.5, 0.4}, {0, 0}), ConfigError);
  }
  SUBCASE("random scores on balanced labels are near 50") {
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> scores;
    std::vector<std::uint8_t> labels;
    for (int i = 0; i < 10000; ++i) {
      scores.push_back(unit(rng));
      labels.push_back(i % 2 == 0);
    }
    const double a = auc(scores, labels);
    CHECK(a > 48.0);
    CHECK(a < 52.0);
  }
  SUBCASE("rank statistic equals exhaustive pairwise counting") {
    std::mt19937 rng(321);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int round = 0; round < 100; ++round) {
      const int n = 2 + static_cast<int>(rng() % 199);
      std::vector<double> scores;
      std::vector<std::uint8_t> labels;
      for (int i = 0; i < n; ++i) {
        // discretized scores force ties
        scores.push_back(std::floor(unit(rng) * 8.0) / 8.0);
        labels.push_back(rng() % 2);
      }
      labels[0] = 1;
      labels[static_cast<std::size_t>(n - 1)] = 0;
      CHECK(auc(scores, labels) ==
            doctest::Approx(testutil::auc_pairwise(scores, labels))
                .epsilon(1e-10));
    }
  }
}

TEST_CASE("metrics are invariant under strictly monotone score transforms") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  for (int i = 0; i < 60; ++i) {
    scores.push_back(unit(rng));
    labels.push_back(rng() % 3 == 0);
  }
  labels[0] = 1;
  labels[1] = 0;
  std::vector<double> transformed;
  for (double v : scores) transformed.push_back(std::exp(3.0 * v) + 7.0);
  CHECK(auc(scores, labels) == doctest::Approx(auc(transformed, labels)));
  const auto r1 = rank(scores, labels);
  const auto r2 = rank(transformed, labels);
  CHECK(r1.order == r2.order);
}

TEST_CASE("P@1 <= A@3 always") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int round = 0; round < 30; ++round) {
    std::vector<RankingResult> rankings;
    for (int p = 0; p < 20; ++p) {
      const int n = 1 + static_cast<int>(rng() % 8);
      std::vector<double> scores(static_cast<std::size_t>(n));
      std::vector<std::uint8_t> rel(static_cast<std::size_t>(n), 0);
      for (auto& s : scores) s = unit(rng);
      rel[rng() % n] = 1;
      rankings.push_back(rank(scores, rel, "p" + std::to_string(p)));
    }
    CHECK(precision_at_1(rankings) <= any_at_3(rankings) + 1e-12);
  }
}

TEST_CASE("compare systems") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto evaluate = [&](bool oracle, std::uint64_t seed) {
    std::mt19937 local(seed + 1000);
    std::vector<RankingResult> rankings;
    std::vector<double> pool_scores;
    std::vector<std::uint8_t> pool_labels;
    for (int p = 0; p < 40; ++p) {
      std::vector<std::uint8_t> rel(5, 0);
      rel[local() % 5] = 1;
      std::vector<double> scores(5);
      for (int i = 0; i < 5; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        scores[idx] = oracle ? static_cast<double>(rel[idx])
                             : std::uniform_real_distribution<double>()(local);
        pool_scores.push_back(scores[idx]);
        pool_labels.push_back(rel[idx]);
      }
      rankings.push_back(rank(scores, rel, "p" + std::to_string(p)));
    }
    MetricReport report;
    report.system = oracle ? "oracle" : "random";
    report.seed = seed;
    report.p_at_1 = precision_at_1(rankings);
    report.a_at_3 = any_at_3(rankings);
    report.map = mean_average_precision(rankings);
    report.auc = auc(pool_scores, pool_labels);
    report.n_posts = rankings.size();
    report.post_set_hash = 42;
    return report;
  };

  std::vector<MetricReport> oracle_runs, random_runs;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    oracle_runs.push_back(evaluate(true, seed));
    random_runs.push_back(evaluate(false, seed));
  }
  const auto oracle_summary = summarize_runs(oracle_runs);
  const auto random_summary = summarize_runs(random_runs);
  CHECK(oracle_summary.p_at_1_mean > random_summary.p_at_1_mean);
  CHECK(oracle_summary.a_at_3_mean > random_summary.a_at_3_mean);
  CHECK(oracle_summary.map_mean > random_summary.map_mean);
  CHECK(oracle_summary.auc_mean > random_summary.auc_mean);

  SUBCASE("identical systems produce identical rows") {
    const auto s1 = summarize_runs(oracle_runs);
    const auto s2 = summarize_runs(oracle_runs);
    const auto table = compare_systems({s1, s2});
    // the two data lines (after the header and rule) must be equal except
    // for the name column
    std::istringstream lines(table);
    std::string header, rule, row1, row2;
    std::getline(lines, header);
    std::getline(lines, rule);
    std::getline(lines, row1);
    std::getline(lines, row2);
    CHECK(row1.substr(16) == row2.substr(16));
  }
  SUBCASE("mismatched post sets are rejected") {
    auto bad = random_runs;
    bad[0].post_set_hash = 7;
    CHECK_THROWS_AS(check_same_posts({oracle_runs, bad}), ConfigError);
    CHECK_NOTHROW(check_same_posts({oracle_runs, random_runs}));
  }
}

TEST_CASE("metrics csv") {
  MetricReport r;
  r.system = "lr";
  r.seed = 3;
  r.p_at_1 = 47.1;
  r.a_at_3 = 76.2;
  r.map = 56.5;
  r.auc = 61.7;
  r.n_posts = 100;
  r.n_sentences = 1500;
  const auto csv = metrics_to_csv({r});
  CHECK(csv.find("system,seed,p_at_1,a_at_3,map,auc,n_posts,n_sentences") == 0);
  CHECK(csv.find("lr,3,47.1,76.2,56.5,61.7,100,1500") != std::string::npos);
}
