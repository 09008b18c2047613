#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "argmine/errors.hpp"
#include "argmine/knowledge.hpp"
#include "testutil.hpp"

using namespace argmine;

namespace {

const StopwordSet& stopwords() {
  static const StopwordSet set =
      load_stopwords(testutil::resource_dir() + "/stopwords.txt");
  return set;
}

// A flat tree whose root statement has the given child stances.
std::string tree_json(const std::string& id, const std::string& text,
                      int pro, int con) {
  std::ostringstream os;
  os << R"({"id":")" << id << R"(","text":")" << text
     << R"(","stance":"pro","children":[)";
  bool first = true;
  for (int i = 0; i < pro; ++i) {
    if (!first) os << ',';
    os << R"({"id":")" << id << "-p" << i
       << R"(","text":"child pro statement )" << i
       << R"(","stance":"pro","children":[]})";
    first = false;
  }
  for (int i = 0; i < con; ++i) {
    if (!first) os << ',';
    os << R"({"id":")" << id << "-c" << i
       << R"(","text":"child con statement )" << i
       << R"(","stance":"con","children":[]})";
    first = false;
  }
  os << "]}";
  return os.str();
}

}  // namespace

TEST_CASE("response counting from children stances") {
  const auto index = KialoIndex::build(
      "[" + tree_json("s1", "school uniforms improve learning outcomes daily", 2, 1) +
          "]",
      stopwords());
  REQUIRE(index.statements().size() == 4);
  CHECK(index.statements()[0].pro_count == 2);
  CHECK(index.statements()[0].con_count == 1);
  CHECK(index.statements()[0].responses() == 3);
  CHECK(index.statements()[1].responses() == 0);
}

TEST_CASE("empty tree list retrieves nothing") {
  const auto index = KialoIndex::build("[]", stopwords());
  const auto matches =
      retrieve({"school", "uniforms", "improve", "learning", "outcomes"},
               index, stopwords());
  CHECK(matches.n() == 0);
  CHECK(frequency_feature(matches) == 0.0);
  CHECK(attractiveness_feature(matches, index) == 0.0);
  CHECK(extremeness_feature(matches, index) == 0.0);
}

TEST_CASE("duplicate statement ids are fatal") {
  const std::string dup = "[" + tree_json("s1", "text one here", 0, 0) + "," +
                          tree_json("s1", "text two here", 0, 0) + "]";
  CHECK_THROWS_AS(KialoIndex::build(dup, stopwords()), DataError);
}

TEST_CASE("malformed nodes name their path") {
  try {
    KialoIndex::build(
        R"([{"id":"a","text":"ok","stance":"pro","children":[{"id":"b","stance":"pro"}]}])",
        stopwords());
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("children[0]") != std::string::npos);
  }
  CHECK_THROWS_AS(
      KialoIndex::build(
          R"([{"id":"a","text":"ok","children":[{"id":"b","text":"x","stance":"maybe"}]}])",
          stopwords()),
      DataError);
}

TEST_CASE("retrieval threshold on distinct content words") {
  const auto index = KialoIndex::build(
      "[" +
          tree_json("s1", "glaciers retreat measured satellites decade arctic",
                    1, 1) +
          "]",
      stopwords());
  SUBCASE("exactly 5 shared -> included") {
    const auto m = retrieve(
        {"glaciers", "retreat", "measured", "satellites", "decade"}, index,
        stopwords(), 5);
    CHECK(m.n() == 1);
    CHECK(m.matches[0].shared_words == 5);
  }
  SUBCASE("4 shared -> excluded") {
    const auto m = retrieve({"glaciers", "retreat", "measured", "satellites"},
                            index, stopwords(), 5);
    CHECK(m.n() == 0);
  }
  SUBCASE("a 3-content-word sentence can never match") {
    const auto m =
        retrieve({"glaciers", "the", "retreat", "of", "measured"}, index,
                 stopwords(), 5);
    CHECK(m.n() == 0);
  }
  SUBCASE("duplicate tokens count once") {
    const auto m = retrieve({"glaciers", "glaciers", "retreat", "retreat",
                             "measured", "satellites"},
                            index, stopwords(), 5);
    CHECK(m.n() == 0);
  }
}

TEST_CASE("frequency feature") {
  // 18 statements sharing the same 5 content words
  std::ostringstream trees;
  trees << "[";
  for (int i = 0; i < 18; ++i) {
    if (i) trees << ",";
    trees << tree_json("s" + std::to_string(i),
                       "glaciers retreat measured satellites decade marker" +
                           std::to_string(i),
                       0, 0);
  }
  trees << "]";
  const auto index = KialoIndex::build(trees.str(), stopwords());
  const auto m = retrieve(
      {"glaciers", "retreat", "measured", "satellites", "decade"}, index,
      stopwords(), 5);
  REQUIRE(m.n() == 18);
  CHECK(std::abs(frequency_feature(m) - std::log2(19.0)) < 1e-9);

  KnowledgeMatchSet one;
  one.matches.push_back({0, 5});
  CHECK(frequency_feature(one) == doctest::Approx(1.0));
}

namespace {

KialoIndex index_with_responses(const std::vector<std::pair<int, int>>& counts) {
  std::ostringstream trees;
  trees << "[";
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i) trees << ",";
    trees << tree_json("s" + std::to_string(i),
                       "glaciers retreat measured satellites decade",
                       counts[i].first, counts[i].second);
  }
  trees << "]";
  return KialoIndex::build(trees.str(), stopwords());
}

KnowledgeMatchSet match_roots(const KialoIndex& index) {
  return retrieve({"glaciers", "retreat", "measured", "satellites", "decade"},
                  index, stopwords(), 5);
}

}  // namespace

TEST_CASE("attractiveness feature") {
  SUBCASE("R = (3, 5) gives log2 5") {
    // hand arithmetic: M = (3 + 5) / 2 = 4, log2(4 + 1) = log2 5
    const auto index = index_with_responses({{2, 1}, {3, 2}});
    const auto m = match_roots(index);
    REQUIRE(m.n() == 2);
    CHECK(std::abs(attractiveness_feature(m, index) - std::log2(5.0)) < 1e-9);
  }
  SUBCASE("single match with zero responses") {
    const auto index = index_with_responses({{0, 0}});
    const auto m = match_roots(index);
    REQUIRE(m.n() == 1);
    CHECK(attractiveness_feature(m, index) == doctest::Approx(0.0));
  }
}

TEST_CASE("extremeness feature") {
  SUBCASE("all pro -> 1") {
    const auto index = index_with_responses({{3, 0}, {2, 0}});
    const auto m = match_roots(index);
    CHECK(extremeness_feature(m, index) == doctest::Approx(1.0));
  }
  SUBCASE("balanced -> 0") {
    const auto index = index_with_responses({{2, 2}});
    const auto m = match_roots(index);
    CHECK(extremeness_feature(m, index) == doctest::Approx(0.0));
  }
  SUBCASE("mixed (1,0) and (0.5,0.5) -> 0.5") {
    // hand arithmetic: (|1-0| + |0.5-0.5|) / 2 = 0.5
    const auto index = index_with_responses({{4, 0}, {1, 1}});
    const auto m = match_roots(index);
    CHECK(extremeness_feature(m, index) == doctest::Approx(0.5));
  }
  SUBCASE("zero-response statements contribute 0") {
    const auto index = index_with_responses({{3, 0}, {0, 0}});
    const auto m = match_roots(index);
    CHECK(extremeness_feature(m, index) == doctest::Approx(0.5));
  }
}

TEST_CASE("knowledge feature invariants") {
  std::mt19937 rng(31);
  for (int round = 0; round < 20; ++round) {
    std::vector<std::pair<int, int>> counts;
    const int n = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
      counts.emplace_back(static_cast<int>(rng() % 5),
                          static_cast<int>(rng() % 5));
    }
    const auto index = index_with_responses(counts);
    const auto m = match_roots(index);
    const double e = extremeness_feature(m, index);
    CHECK(e >= 0.0);
    CHECK(e <= 1.0);
    CHECK(frequency_feature(m) >= 0.0);
    CHECK(attractiveness_feature(m, index) >= 0.0);

    // monotonicity: a larger index never lowers N
    auto grown_counts = counts;
    grown_counts.emplace_back(1, 1);
    const auto grown = index_with_responses(grown_counts);
    const auto m2 = match_roots(grown);
    CHECK(m2.n() >= m.n());
    CHECK(frequency_feature(m2) >= frequency_feature(m));

    // token order invariance
    std::vector<std::string> tokens = {"measured", "glaciers", "decade",
                                       "satellites", "retreat"};
    std::shuffle(tokens.begin(), tokens.end(), rng);
    const auto shuffled = retrieve(tokens, index, stopwords(), 5);
    CHECK(shuffled.n() == m.n());
  }
}
