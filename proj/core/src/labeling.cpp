#include "argmine/labeling.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "argmine/errors.hpp"
#include "argmine/parallel.hpp"
#include "argmine/text.hpp"

namespace argmine {

using nlohmann::json;

const char* to_string(AttackLabeling::ExclusionReason r) {
  switch (r) {
    case AttackLabeling::ExclusionReason::new_sentence_attack:
      return "new_sentence_attack";
    case AttackLabeling::ExclusionReason::too_many_quotes:
      return "too_many_quotes";
  }
  return "new_sentence_attack";
}

StopwordSet load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read stopword file: " + path);
  StopwordSet set;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    set.insert(line);
  }
  return set;
}

std::vector<Quote> extract_direct_quotes(const std::string& comment_id,
                                         const std::string& body) {
  std::vector<Quote> quotes;
  std::string current;
  bool in_quote = false;

  auto flush = [&] {
    // trim
    std::size_t b = current.find_first_not_of(" \t\r\n");
    std::size_t e = current.find_last_not_of(" \t\r\n");
    if (b != std::string::npos) {
      quotes.push_back(
          Quote{comment_id, current.substr(b, e - b + 1), Quote::Kind::direct});
    }
    current.clear();
    in_quote = false;
  };

  std::istringstream lines(body);
  std::string line;
  while (std::getline(lines, line)) {
    std::size_t p = line.find_first_not_of(" \t\r");
    bool quote_line = p != std::string::npos &&
                      (line[p] == '>' || line.compare(p, 4, "&gt;") == 0);
    if (quote_line) {
      std::size_t q = p;
      while (q < line.size() && (line[q] == '>' || line[q] == ' ' ||
                                 line.compare(q, 4, "&gt;") == 0)) {
        q += line[q] == '&' ? 4 : 1;
      }
      if (in_quote) current.push_back(' ');
      current.append(line.substr(q));
      in_quote = true;
    } else if (in_quote) {
      flush();
    }
  }
  if (in_quote) flush();
  return quotes;
}

namespace {

struct Alignment {
  int distance = std::numeric_limits<int>::max();
  std::size_t window_begin = 0;  // matched window in the span text, [b, e)
  std::size_t window_end = 0;
  int matched_chars = 0;         // quote chars aligned to equal span chars
};

// Two-row semi-global distance only; O(|text|) memory. Used to reject spans
// before the full traceback table is built.
int quote_distance(const std::string& quote, const std::string& text) {
  const std::size_t qn = quote.size();
  const std::size_t tn = text.size();
  if (qn == 0 || tn == 0) return std::numeric_limits<int>::max();
  std::vector<std::uint16_t> prev(tn + 1, 0), cur(tn + 1);
  for (std::size_t i = 1; i <= qn; ++i) {
    cur[0] = static_cast<std::uint16_t>(std::min<std::size_t>(i, 60000));
    for (std::size_t j = 1; j <= tn; ++j) {
      const std::uint16_t sub = static_cast<std::uint16_t>(
          prev[j - 1] + (quote[i - 1] == text[j - 1] ? 0 : 1));
      const std::uint16_t del = static_cast<std::uint16_t>(prev[j] + 1);
      const std::uint16_t ins = static_cast<std::uint16_t>(cur[j - 1] + 1);
      cur[j] = std::min(sub, std::min(del, ins));
    }
    std::swap(prev, cur);
  }
  std::uint16_t best = std::numeric_limits<std::uint16_t>::max();
  for (std::size_t j = 0; j <= tn; ++j) best = std::min(best, prev[j]);
  return best;
}

// Semi-global Levenshtein: the whole quote against any substring of `text`
// (free end-gaps on the text side). Traceback recovers the matched window
// and the number of exactly matched quote characters.
Alignment align_quote(const std::string& quote, const std::string& text) {
  const std::size_t qn = quote.size();
  const std::size_t tn = text.size();
  Alignment best;
  if (qn == 0 || tn == 0) return best;

  // dp is (qn+1) x (tn+1); row-major, entries capped below 2^16.
  std::vector<std::uint16_t> dp((qn + 1) * (tn + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::uint16_t& {
    return dp[i * (tn + 1) + j];
  };
  for (std::size_t j = 0; j <= tn; ++j) at(0, j) = 0;
  for (std::size_t i = 1; i <= qn; ++i) {
    at(i, 0) = static_cast<std::uint16_t>(std::min<std::size_t>(i, 60000));
    for (std::size_t j = 1; j <= tn; ++j) {
      const std::uint16_t sub =
          static_cast<std::uint16_t>(at(i - 1, j - 1) +
                                     (quote[i - 1] == text[j - 1] ? 0 : 1));
      const std::uint16_t del = static_cast<std::uint16_t>(at(i - 1, j) + 1);
      const std::uint16_t ins = static_cast<std::uint16_t>(at(i, j - 1) + 1);
      at(i, j) = std::min(sub, std::min(del, ins));
    }
  }

  std::size_t best_j = 0;
  std::uint16_t best_d = std::numeric_limits<std::uint16_t>::max();
  for (std::size_t j = 0; j <= tn; ++j) {
    if (at(qn, j) < best_d) {
      best_d = at(qn, j);
      best_j = j;
    }
  }

  // Traceback from (qn, best_j) to row 0.
  std::size_t i = qn, j = best_j;
  int matched = 0;
  while (i > 0) {
    const std::uint16_t cur = at(i, j);
    if (j > 0 &&
        cur == at(i - 1, j - 1) + (quote[i - 1] == text[j - 1] ? 0 : 1)) {
      if (quote[i - 1] == text[j - 1]) ++matched;
      --i;
      --j;
    } else if (cur == at(i - 1, j) + 1) {
      --i;
    } else {
      --j;
    }
  }

  best.distance = best_d;
  best.window_begin = j;
  best.window_end = best_j;
  best.matched_chars = matched;
  return best;
}

bool window_has_word(const std::string& text, std::size_t b, std::size_t e) {
  for (std::size_t p = b; p < e && p < text.size(); ++p) {
    char c = text[p];
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return true;
  }
  return false;
}

}  // namespace

std::optional<QuoteMatch> match_direct_quote(const Quote& quote,
                                             const Post& post,
                                             const LabelingConfig& cfg) {
  const std::string q = normalize_for_match(quote.text);
  if (q.empty() || q.size() > 20000) return std::nullopt;
  const int n = static_cast<int>(post.sentences.size());
  if (n == 0) return std::nullopt;

  std::vector<std::string> norm(n);
  for (int i = 0; i < n; ++i)
    norm[i] = normalize_for_match(post.sentences[i].text);

  std::optional<QuoteMatch> best;
  int best_len = 0;

  for (int first = 0; first < n; ++first) {
    std::string span_text;
    std::vector<std::size_t> offsets;  // start offset of each sentence
    const int last_cap = std::min(n - 1, first + cfg.max_span_sentences - 1);
    for (int last = first; last <= last_cap; ++last) {
      if (last > first) {
        // All middle sentences must fit inside a window of |q| + budget.
        const std::size_t middle_len =
            last > first + 1 ? span_text.size() - norm[first].size() - 1 : 0;
        if (middle_len > q.size() + static_cast<std::size_t>(cfg.edit_budget))
          break;
        span_text.push_back(' ');
      }
      offsets.push_back(span_text.size());
      span_text.append(norm[last]);

      if (span_text.size() + static_cast<std::size_t>(cfg.edit_budget) <
          q.size()) {
        continue;  // span too short to absorb the quote
      }
      if (q.size() * span_text.size() > 64u * 1024 * 1024) {
        continue;  // degenerate input; the table would not fit sane memory
      }

      // cheap two-row reject before building the traceback table
      if (quote_distance(q, span_text) > cfg.edit_budget) continue;

      Alignment a = align_quote(q, span_text);
      if (a.distance > cfg.edit_budget) continue;

      // The window must reach both edge sentences of the span.
      const std::size_t first_end = offsets[0] + norm[first].size();
      const std::size_t last_begin = offsets[last - first];
      if (!(a.window_begin < first_end && a.window_end > last_begin)) continue;

      if (a.window_end - a.window_begin <
          static_cast<std::size_t>(cfg.min_span_chars))
        continue;
      if (!window_has_word(span_text, a.window_begin, a.window_end)) continue;

      const double coverage =
          static_cast<double>(a.matched_chars) / static_cast<double>(q.size());
      if (coverage < cfg.min_coverage) continue;

      const int span_len = last - first + 1;
      if (span_len > best_len) {
        best_len = span_len;
        best = QuoteMatch{quote, first, last, a.distance, coverage};
      }
    }
  }
  return best;
}

std::vector<int> match_implicit(
    const std::vector<std::string>& comment_sentence_tokens, const Post& post,
    const StopwordSet& stopwords, const LabelingConfig& cfg) {
  std::unordered_set<std::string> comment_types(comment_sentence_tokens.begin(),
                                                comment_sentence_tokens.end());
  std::vector<int> matched;
  for (const auto& sent : post.sentences) {
    std::unordered_set<std::string> seen;
    int shared = 0;
    for (const auto& tok : sent.tokens) {
      if (stopwords.count(tok)) continue;
      if (!window_has_word(tok, 0, tok.size())) continue;  // punctuation
      if (!seen.insert(tok).second) continue;
      if (comment_types.count(tok)) ++shared;
    }
    if (shared >= cfg.implicit_overlap) matched.push_back(sent.index);
  }
  return matched;
}

namespace {

// Comment body with the ">"-prefixed quote lines removed; implicit matching
// runs on the commenter's own prose.
std::string strip_quote_lines(const std::string& body) {
  std::string out;
  std::istringstream lines(body);
  std::string line;
  while (std::getline(lines, line)) {
    std::size_t p = line.find_first_not_of(" \t\r");
    if (p != std::string::npos &&
        (line[p] == '>' || line.compare(p, 4, "&gt;") == 0))
      continue;
    out.append(line);
    out.push_back('\n');
  }
  return out;
}

// All sentences a comment attacks: accepted direct-quote spans plus implicit
// echoes. Evidence rows appended when `evidence` is non-null.
std::vector<int> attacked_sentences(const Comment& comment, const Post& post,
                                    const StopwordSet& stopwords,
                                    const LabelingConfig& cfg,
                                    std::vector<SentenceEvidence>* evidence) {
  std::vector<int> out;
  auto add = [&](int idx) {
    if (std::find(out.begin(), out.end(), idx) == out.end()) out.push_back(idx);
  };

  for (const auto& quote : extract_direct_quotes(comment.id, comment.body)) {
    if (auto m = match_direct_quote(quote, post, cfg)) {
      for (int s = m->first_sentence; s <= m->last_sentence; ++s) {
        add(s);
        if (evidence) {
          evidence->push_back(SentenceEvidence{s, comment.id,
                                               Quote::Kind::direct,
                                               m->edit_distance, m->coverage});
        }
      }
    }
  }

  for (const auto& span : segment_sentences(strip_quote_lines(comment.body))) {
    const auto tokens = tokenize(span.text);
    for (int s : match_implicit(tokens, post, stopwords, cfg)) {
      add(s);
      if (evidence) {
        evidence->push_back(
            SentenceEvidence{s, comment.id, Quote::Kind::implicit, 0, 0.0});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

AttackLabeling label_attacked(const Post& post,
                              const std::vector<const Comment*>& top_level,
                              const StopwordSet& stopwords,
                              const LabelingConfig& cfg) {
  AttackLabeling labeling;
  labeling.attacked.assign(post.sentences.size(), false);
  labeling.success.assign(post.sentences.size(), Success::unattacked);
  for (const Comment* c : top_level) {
    for (int s : attacked_sentences(*c, post, stopwords, cfg,
                                    &labeling.evidence)) {
      labeling.attacked[static_cast<std::size_t>(s)] = true;
    }
  }
  for (std::size_t i = 0; i < labeling.attacked.size(); ++i) {
    labeling.success[i] =
        labeling.attacked[i] ? Success::unsuccessful : Success::unattacked;
  }
  return labeling;
}

namespace {

using DescendantsFn =
    std::function<std::vector<const Comment*>(const std::string&)>;

void label_success_impl(const Post& post,
                        const std::vector<const Comment*>& top_level,
                        const DescendantsFn& descendants,
                        AttackLabeling& labeling, const StopwordSet& stopwords,
                        const LabelingConfig& cfg) {
  for (const Comment* c : top_level) {
    std::vector<int> attacked = attacked_sentences(*c, post, stopwords, cfg,
                                                   nullptr);
    if (attacked.empty()) continue;

    const auto subtree = descendants(c->id);
    bool delta = c->delta_awarded;
    for (const Comment* d : subtree) delta = delta || d->delta_awarded;
    if (!delta) continue;

    // Exclusion: a lower-level comment of this challenger quotes sentences
    // the challenger did not attack.
    bool excluded = false;
    for (const Comment* d : subtree) {
      for (int s : attacked_sentences(*d, post, stopwords, cfg, nullptr)) {
        if (!std::binary_search(attacked.begin(), attacked.end(), s)) {
          labeling.excluded.push_back(
              {c->id, AttackLabeling::ExclusionReason::new_sentence_attack});
          excluded = true;
          break;
        }
      }
      if (excluded) break;
    }
    if (excluded) continue;

    // Exclusion: too many quotes to tell which one changed the view.
    if (static_cast<int>(extract_direct_quotes(c->id, c->body).size()) >
        cfg.max_quotes) {
      labeling.excluded.push_back(
          {c->id, AttackLabeling::ExclusionReason::too_many_quotes});
      continue;
    }

    for (int s : attacked) {
      labeling.success[static_cast<std::size_t>(s)] = Success::successful;
    }
  }
}

}  // namespace

void label_success(const Post& post, const Corpus& corpus,
                   AttackLabeling& labeling, const StopwordSet& stopwords,
                   const LabelingConfig& cfg) {
  label_success_impl(
      post, corpus.top_level_comments(post.id),
      [&](const std::string& id) { return corpus.descendants(id); }, labeling,
      stopwords, cfg);
}

AttackLabeling label_post(const Post& post, const Corpus& corpus,
                          const StopwordSet& stopwords,
                          const LabelingConfig& cfg) {
  AttackLabeling labeling =
      label_attacked(post, corpus.top_level_comments(post.id), stopwords, cfg);
  label_success(post, corpus, labeling, stopwords, cfg);
  return labeling;
}

std::vector<AttackLabeling> label_corpus(Corpus& corpus,
                                         const StopwordSet& stopwords,
                                         const LabelingConfig& cfg, int jobs) {
  // Shared lookup tables; per-post labeling stays independent.
  std::unordered_map<std::string, std::vector<const Comment*>> top_of_post;
  std::unordered_map<std::string, std::vector<const Comment*>> children;
  for (const auto& c : corpus.comments) {
    if (c.parent_id) {
      children[*c.parent_id].push_back(&c);
    } else {
      top_of_post[c.post_id].push_back(&c);
    }
  }
  auto descendants = [&](const std::string& id) {
    std::vector<const Comment*> out;
    std::vector<const Comment*> stack;
    auto push_children = [&](const std::string& cid) {
      auto it = children.find(cid);
      if (it == children.end()) return;
      for (auto rit = it->second.rbegin(); rit != it->second.rend(); ++rit)
        stack.push_back(*rit);
    };
    push_children(id);
    while (!stack.empty()) {
      const Comment* c = stack.back();
      stack.pop_back();
      out.push_back(c);
      push_children(c->id);
    }
    return out;
  };

  std::vector<AttackLabeling> labelings(corpus.posts.size());
  parallel_for(corpus.posts.size(), jobs, [&](std::size_t i) {
    const Post& post = corpus.posts[i];
    static const std::vector<const Comment*> kNone;
    auto it = top_of_post.find(post.id);
    const auto& top = it == top_of_post.end() ? kNone : it->second;
    AttackLabeling lab = label_attacked(post, top, stopwords, cfg);
    label_success_impl(post, top, descendants, lab, stopwords, cfg);
    labelings[i] = std::move(lab);
  });

  for (std::size_t i = 0; i < corpus.posts.size(); ++i) {
    auto& post = corpus.posts[i];
    for (auto& s : post.sentences) {
      s.attacked = labelings[i].attacked[static_cast<std::size_t>(s.index)];
      s.success = labelings[i].success[static_cast<std::size_t>(s.index)];
    }
  }
  return labelings;
}

DatasetMembership build_datasets(const Corpus& corpus) {
  DatasetMembership d;
  for (const auto& post : corpus.posts) {
    bool any_attacked = false;
    bool any_successful = false;
    for (const auto& s : post.sentences) {
      any_attacked = any_attacked || s.attacked;
      any_successful = any_successful || s.success == Success::successful;
    }
    if (any_attacked) d.attacked_posts.push_back(post.id);
    if (any_successful) d.successful_posts.push_back(post.id);
  }
  return d;
}

std::string labels_to_jsonl(const Corpus& corpus,
                            const std::vector<AttackLabeling>& labelings) {
  std::ostringstream out;
  for (std::size_t i = 0; i < corpus.posts.size(); ++i) {
    const auto& post = corpus.posts[i];
    const auto& lab = labelings[i];
    for (const auto& s : post.sentences) {
      json j;
      j["post_id"] = post.id;
      j["sentence_index"] = s.index;
      j["attacked"] = lab.attacked[static_cast<std::size_t>(s.index)];
      j["success"] =
          to_string(lab.success[static_cast<std::size_t>(s.index)]);
      json evidence = json::array();
      for (const auto& e : lab.evidence) {
        if (e.sentence_index != s.index) continue;
        evidence.push_back(json::array(
            {e.comment_id,
             e.kind == Quote::Kind::direct ? "direct" : "implicit",
             e.edit_distance, e.coverage}));
      }
      j["evidence"] = std::move(evidence);
      out << j.dump() << "\n";
    }
  }
  return out.str();
}

void apply_labels_jsonl(Corpus& corpus, std::istream& jsonl) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(jsonl, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw DataError("labels line " + std::to_string(lineno) +
                      ": not a JSON object");
    }
    const auto post_id = j.at("post_id").get<std::string>();
    const int index = j.at("sentence_index").get<int>();
    auto it = corpus.post_index.find(post_id);
    if (it == corpus.post_index.end()) {
      throw DataError("labels line " + std::to_string(lineno) +
                      ": unknown post '" + post_id + "'");
    }
    auto& post = corpus.posts[it->second];
    if (index < 0 || index >= static_cast<int>(post.sentences.size())) {
      throw DataError("labels line " + std::to_string(lineno) +
                      ": sentence index out of range");
    }
    auto& s = post.sentences[static_cast<std::size_t>(index)];
    s.attacked = j.at("attacked").get<bool>();
    s.success = success_from_string(j.at("success").get<std::string>());
  }
}

}  // namespace argmine
