#include "argmine/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "argmine/errors.hpp"
#include "argmine/text.hpp"

namespace argmine {

void PhraseLexicon::add(const std::string& entry, double score) {
  Entry e;
  e.tokens = tokenize(entry);
  e.score = score;
  if (e.tokens.empty()) return;
  auto& bucket = first_token_[e.tokens.front()];
  bucket.push_back(std::move(e));
  std::stable_sort(bucket.begin(), bucket.end(),
                   [](const Entry& a, const Entry& b) {
                     return a.tokens.size() > b.tokens.size();
                   });
  ++n_entries_;
}

PhraseLexicon PhraseLexicon::load_tsv(const std::string& path,
                                      const std::string& name,
                                      double default_score) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read lexicon file: " + path);
  PhraseLexicon lex(name);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::string entry = line;
    double score = default_score;
    const std::size_t tab = line.find('\t');
    if (tab != std::string::npos) {
      entry = line.substr(0, tab);
      try {
        score = std::stod(line.substr(tab + 1));
      } catch (const std::exception&) {
        throw DataError(path + " line " + std::to_string(lineno) +
                        ": invalid score");
      }
    }
    lex.add(entry, score);
  }
  if (lex.empty()) throw DataError("lexicon file is empty: " + path);
  return lex;
}

void PhraseLexicon::standardize() {
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (const auto& [_, bucket] : first_token_) {
    for (const auto& e : bucket) {
      sum += e.score;
      ++n;
    }
  }
  if (n == 0) return;
  const double mean = sum / static_cast<double>(n);
  for (const auto& [_, bucket] : first_token_) {
    for (const auto& e : bucket) {
      const double d = e.score - mean;
      sq += d * d;
    }
  }
  const double sd = std::sqrt(sq / static_cast<double>(n));
  for (auto& [_, bucket] : first_token_) {
    for (auto& e : bucket) {
      e.score = sd > 0.0 ? (e.score - mean) / sd : 0.0;
    }
  }
}

std::vector<double> PhraseLexicon::match_scores(
    const std::vector<std::string>& tokens) const {
  std::vector<double> scores;
  std::size_t i = 0;
  while (i < tokens.size()) {
    auto it = first_token_.find(tokens[i]);
    if (it == first_token_.end()) {
      ++i;
      continue;
    }
    bool matched = false;
    for (const auto& entry : it->second) {  // longest first
      if (i + entry.tokens.size() > tokens.size()) continue;
      if (std::equal(entry.tokens.begin(), entry.tokens.end(),
                     tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
        scores.push_back(entry.score);
        i += entry.tokens.size();
        matched = true;
        break;
      }
    }
    if (!matched) ++i;
  }
  return scores;
}

double PhraseLexicon::mean_score() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& [_, bucket] : first_token_) {
    for (const auto& e : bucket) {
      sum += e.score;
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

void RegexLexicon::add(const std::string& pattern) {
  try {
    patterns_.emplace_back(pattern, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw DataError("lexicon '" + name_ + "': bad regex '" + pattern +
                    "': " + e.what());
  }
  sources_.push_back(pattern);
}

RegexLexicon RegexLexicon::load(const std::string& path,
                                const std::string& name) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read regex lexicon file: " + path);
  RegexLexicon lex(name);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    lex.add(line);
  }
  if (lex.empty()) throw DataError("regex lexicon file is empty: " + path);
  return lex;
}

bool RegexLexicon::any_match(const std::string& lowercased_text) const {
  for (const auto& re : patterns_) {
    if (std::regex_search(lowercased_text, re)) return true;
  }
  return false;
}

std::vector<std::string> load_word_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read word list: " + path);
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    words.push_back(line);
  }
  return words;
}

}  // namespace argmine
