#pragma once

// Test-side oracles. These stay independent of the library code paths they
// check: plain DP edit distance, quadrature normal CDF, exhaustive pairwise
// AUC.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "argmine/corpus.hpp"
#include "argmine/text.hpp"

namespace testutil {

// Full Levenshtein distance by the classic DP recurrence.
inline int levenshtein(const std::string& a, const std::string& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<int> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

// Phi(z) via composite Simpson on the normal density; |error| << 1e-10.
inline double normal_cdf_quadrature(double z) {
  const double a = 0.0, b = std::abs(z);
  const int n = 20000;  // even
  const double h = (b - a) / n;
  auto density = [](double t) {
    return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI);
  };
  double sum = density(a) + density(b);
  for (int i = 1; i < n; ++i) {
    sum += density(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  const double integral = sum * h / 3.0;
  const double phi_abs = 0.5 + integral;
  return z >= 0 ? phi_abs : 1.0 - phi_abs;
}

inline double two_sided_p_quadrature(double z) {
  return 2.0 * (1.0 - normal_cdf_quadrature(std::abs(z)));
}

// Exhaustive pairwise AUC (percent): ties get half credit.
inline double auc_pairwise(const std::vector<double>& scores,
                           const std::vector<std::uint8_t>& labels) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      ++pairs;
      if (scores[i] > scores[j]) {
        wins += 1.0;
      } else if (scores[i] == scores[j]) {
        wins += 0.5;
      }
    }
  }
  return 100.0 * wins / static_cast<double>(pairs);
}

// A post with segmented, tokenized sentences (mirrors ingest).
inline argmine::Post make_post(const std::string& id, const std::string& body,
                               std::int64_t created_utc = 1) {
  argmine::Post post;
  post.id = id;
  post.body = body;
  post.created_utc = created_utc;
  int index = 0;
  for (const auto& span : argmine::segment_sentences(body)) {
    argmine::SentenceRecord rec;
    rec.post_id = id;
    rec.index = index++;
    rec.text = span.text;
    rec.begin = span.begin;
    rec.end = span.end;
    rec.tokens = argmine::tokenize(rec.text);
    post.sentences.push_back(std::move(rec));
  }
  return post;
}

inline argmine::Comment make_comment(const std::string& id,
                                     const std::string& post_id,
                                     const std::string& body,
                                     bool delta = false,
                                     const std::string& parent = "") {
  argmine::Comment c;
  c.id = id;
  c.post_id = post_id;
  c.body = body;
  c.created_utc = 1;
  c.delta_awarded = delta;
  if (!parent.empty()) c.parent_id = parent;
  return c;
}

inline std::string resource_dir() { return ARGMINE_RESOURCE_DIR; }
inline std::string fixture_dir() { return ARGMINE_FIXTURE_DIR; }

}  // namespace testutil
