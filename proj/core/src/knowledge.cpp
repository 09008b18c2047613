#include "argmine/knowledge.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "argmine/errors.hpp"
#include "argmine/text.hpp"

namespace argmine {

using nlohmann::json;

namespace {

bool has_letter_or_digit(const std::string& tok) {
  for (char c : tok) {
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) return true;
  }
  return false;
}

std::vector<std::string> content_types(const std::vector<std::string>& tokens,
                                       const StopwordSet& stopwords) {
  std::vector<std::string> types;
  for (const auto& tok : tokens) {
    if (stopwords.count(tok)) continue;
    if (!has_letter_or_digit(tok)) continue;
    types.push_back(tok);
  }
  std::sort(types.begin(), types.end());
  types.erase(std::unique(types.begin(), types.end()), types.end());
  return types;
}

void walk_tree(const json& node, const std::string& path,
               const StopwordSet& stopwords,
               std::vector<KnowledgeStatement>& out) {
  if (!node.is_object()) throw DataError(path + ": node is not an object");
  if (!node.contains("id") || !node.at("id").is_string())
    throw DataError(path + ": missing or invalid 'id'");
  if (!node.contains("text") || !node.at("text").is_string())
    throw DataError(path + ": missing or invalid 'text'");
  if (node.contains("stance") && !node.at("stance").is_string())
    throw DataError(path + ": invalid 'stance'");

  KnowledgeStatement st;
  st.id = node.at("id").get<std::string>();
  st.text = node.at("text").get<std::string>();
  st.content_types = content_types(tokenize(st.text), stopwords);

  if (node.contains("children")) {
    const auto& children = node.at("children");
    if (!children.is_array()) throw DataError(path + ": 'children' not an array");
    for (std::size_t i = 0; i < children.size(); ++i) {
      const auto& child = children[i];
      const std::string child_path =
          path + ".children[" + std::to_string(i) + "]";
      if (!child.is_object() || !child.contains("stance") ||
          !child.at("stance").is_string()) {
        throw DataError(child_path + ": missing or invalid 'stance'");
      }
      const std::string stance = child.at("stance").get<std::string>();
      if (stance == "pro") {
        ++st.pro_count;
      } else if (stance == "con") {
        ++st.con_count;
      } else {
        throw DataError(child_path + ": stance must be 'pro' or 'con'");
      }
    }
  }
  out.push_back(std::move(st));

  if (node.contains("children")) {
    const auto& children = node.at("children");
    for (std::size_t i = 0; i < children.size(); ++i) {
      walk_tree(children[i], path + ".children[" + std::to_string(i) + "]",
                stopwords, out);
    }
  }
}

}  // namespace

KialoIndex KialoIndex::build(const std::string& json_text,
                             const StopwordSet& stopwords) {
  json root = json::parse(json_text, nullptr, false);
  if (root.is_discarded() || !root.is_array())
    throw DataError("kialo file: expected a JSON array of trees");

  KialoIndex index;
  for (std::size_t t = 0; t < root.size(); ++t) {
    walk_tree(root[t], "trees[" + std::to_string(t) + "]", stopwords,
              index.statements_);
  }

  std::unordered_map<std::string, int> seen;
  for (std::size_t i = 0; i < index.statements_.size(); ++i) {
    const auto& st = index.statements_[i];
    auto [it, inserted] = seen.emplace(st.id, static_cast<int>(i));
    if (!inserted) {
      throw DataError("kialo file: duplicate statement id '" + st.id + "'");
    }
    for (const auto& tok : st.content_types) {
      index.postings_[tok].push_back(static_cast<int>(i));
    }
  }
  return index;
}

KialoIndex KialoIndex::load(const std::string& path,
                            const StopwordSet& stopwords) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read kialo file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return build(buf.str(), stopwords);
}

const std::vector<int>* KialoIndex::postings(const std::string& token) const {
  auto it = postings_.find(token);
  return it == postings_.end() ? nullptr : &it->second;
}

KnowledgeMatchSet retrieve(const std::vector<std::string>& sentence_tokens,
                           const KialoIndex& index,
                           const StopwordSet& stopwords, int min_common) {
  KnowledgeMatchSet out;
  const auto types = content_types(sentence_tokens, stopwords);
  if (static_cast<int>(types.size()) < min_common) return out;

  std::unordered_map<int, int> shared;
  for (const auto& tok : types) {
    if (const auto* posting = index.postings(tok)) {
      for (int s : *posting) ++shared[s];
    }
  }
  for (const auto& [statement, count] : shared) {
    if (count >= min_common) out.matches.push_back({statement, count});
  }
  std::sort(out.matches.begin(), out.matches.end(),
            [](const KnowledgeMatch& a, const KnowledgeMatch& b) {
              return a.statement < b.statement;
            });
  return out;
}

double frequency_feature(const KnowledgeMatchSet& matches) {
  return std::log2(static_cast<double>(matches.n()) + 1.0);
}

double attractiveness_feature(const KnowledgeMatchSet& matches,
                              const KialoIndex& index) {
  if (matches.n() == 0) return 0.0;
  double sum = 0.0;
  for (const auto& m : matches.matches) {
    sum += static_cast<double>(
        index.statements()[static_cast<std::size_t>(m.statement)].responses());
  }
  const double mean = sum / static_cast<double>(matches.n());
  return std::log2(mean + 1.0);
}

double extremeness_feature(const KnowledgeMatchSet& matches,
                           const KialoIndex& index) {
  if (matches.n() == 0) return 0.0;
  double sum = 0.0;
  for (const auto& m : matches.matches) {
    const auto& st = index.statements()[static_cast<std::size_t>(m.statement)];
    const int r = st.responses();
    if (r == 0) continue;  // proportions undefined, contributes 0
    const double p = static_cast<double>(st.pro_count) / static_cast<double>(r);
    const double n = static_cast<double>(st.con_count) / static_cast<double>(r);
    sum += std::abs(p - n);
  }
  return sum / static_cast<double>(matches.n());
}

}  // namespace argmine
