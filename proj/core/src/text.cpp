#include "argmine/text.hpp"

#include <cctype>
#include <unordered_set>

namespace argmine {

namespace {

bool is_space_byte(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_upper_byte(char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit_byte(char c) { return c >= '0' && c <= '9'; }

bool is_word_byte(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || u >= 0x80;
}

const std::unordered_set<std::string>& abbreviations() {
  static const std::unordered_set<std::string> set = {
      "mr",   "mrs",  "ms",  "dr",   "prof", "sr",  "jr",   "st",
      "etc",  "vs",   "e.g", "i.e",  "cf",   "al",  "inc",  "ltd",
      "co",   "corp", "fig", "no",   "dept", "est", "approx", "misc",
      "min",  "max",  "u.s", "u.k",  "a.m",  "p.m", "ph.d", "b.c",
      "a.d",  "sen",  "rep", "gov",  "gen",  "capt"};
  return set;
}

// Word immediately before position `i` (exclusive), letters and internal dots
// only, lowercased. Used for the abbreviation guard.
std::string word_before(std::string_view text, std::size_t i) {
  std::size_t end = i;
  std::size_t begin = end;
  while (begin > 0) {
    char c = text[begin - 1];
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '.') {
      --begin;
    } else {
      break;
    }
  }
  std::string w;
  for (std::size_t p = begin; p < end; ++p) {
    char c = text[p];
    w.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  while (!w.empty() && w.front() == '.') w.erase(w.begin());
  return w;
}

// A period ends a numeric bullet if the digits before it start a line.
bool is_line_start_bullet(std::string_view text, std::size_t dot) {
  std::size_t begin = dot;
  std::size_t digits = 0;
  while (begin > 0 && is_digit_byte(text[begin - 1])) {
    --begin;
    ++digits;
  }
  if (digits == 0 || digits > 3) return false;
  while (begin > 0) {
    char c = text[begin - 1];
    if (c == '\n') return true;
    if (c == ' ' || c == '\t' || c == '\r') {
      --begin;
      continue;
    }
    return false;
  }
  return true;  // start of text
}

void emit_span(std::string_view text, std::size_t begin, std::size_t end,
               std::vector<SentenceSpan>& out) {
  while (begin < end && is_space_byte(text[begin])) ++begin;
  while (end > begin && is_space_byte(text[end - 1])) --end;
  if (begin >= end) return;
  out.push_back(SentenceSpan{std::string(text.substr(begin, end - begin)),
                             begin, end});
}

}  // namespace

std::vector<SentenceSpan> segment_sentences(std::string_view text) {
  std::vector<SentenceSpan> spans;
  std::size_t start = 0;
  const std::size_t n = text.size();

  for (std::size_t i = 0; i < n; ++i) {
    char c = text[i];

    // Blank line: hard boundary regardless of punctuation.
    if (c == '\n') {
      std::size_t j = i + 1;
      bool blank = false;
      while (j < n && is_space_byte(text[j])) {
        if (text[j] == '\n') blank = true;
        ++j;
      }
      if (blank) {
        emit_span(text, start, i, spans);
        start = j;
        i = j - 1;
      }
      continue;
    }

    if (c != '.' && c != '!' && c != '?') continue;

    // Consume closing quotes/brackets that belong to the sentence.
    std::size_t tail = i + 1;
    while (tail < n && (text[tail] == '"' || text[tail] == '\'' ||
                        text[tail] == ')' || text[tail] == ']')) {
      ++tail;
    }
    if (tail >= n) continue;  // trailing text flushed after the loop
    if (!is_space_byte(text[tail])) continue;

    if (c == '.') {
      if (is_line_start_bullet(text, i)) continue;
      const std::string prev = word_before(text, i);
      if (abbreviations().count(prev)) continue;
    }

    // Whitespace run after the terminator: a line break always splits,
    // otherwise the next letter must be uppercase.
    std::size_t j = tail;
    bool has_newline = false;
    while (j < n && is_space_byte(text[j])) {
      if (text[j] == '\n') has_newline = true;
      ++j;
    }
    if (j >= n) break;  // flushed after the loop
    if (has_newline || is_upper_byte(text[j])) {
      emit_span(text, start, tail, spans);
      start = j;
      i = j - 1;
    }
  }
  emit_span(text, start, n, spans);
  return spans;
}

namespace {

void flush_word(std::string& word, std::vector<std::string>& out) {
  if (word.empty()) return;
  // Penn-style contraction splits so n-grams like "ca n't" and "i 'm" exist.
  auto is_alpha = [](const std::string& s) {
    for (char c : s)
      if (c < 'a' || c > 'z') return false;
    return !s.empty();
  };
  std::size_t apo = word.find('\'');
  if (apo != std::string::npos && apo > 0 && apo + 1 < word.size() &&
      word.find('\'', apo + 1) == std::string::npos && is_alpha(word.substr(0, apo))) {
    std::string head = word.substr(0, apo);
    std::string rest = word.substr(apo + 1);
    if (rest == "t" && head.size() > 1 && head.back() == 'n') {
      out.push_back(head.substr(0, head.size() - 1));
      out.push_back("n't");
      word.clear();
      return;
    }
    if (rest == "s" || rest == "ve" || rest == "re" || rest == "m" ||
        rest == "ll" || rest == "d") {
      out.push_back(head);
      out.push_back("'" + rest);
      word.clear();
      return;
    }
  }
  out.push_back(word);
  word.clear();
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string word;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    unsigned char u = static_cast<unsigned char>(c);
    // Normalize the UTF-8 right single quote to an ASCII apostrophe.
    if (u == 0xE2 && i + 2 < text.size() &&
        static_cast<unsigned char>(text[i + 1]) == 0x80 &&
        static_cast<unsigned char>(text[i + 2]) == 0x99) {
      c = '\'';
      i += 2;
    }
    if (is_word_byte(c)) {
      word.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      continue;
    }
    if (c == '\'') {
      if (!word.empty() || (i + 1 < text.size() && is_word_byte(text[i + 1]))) {
        word.push_back('\'');
        continue;
      }
    }
    flush_word(word, tokens);
    if (!is_space_byte(c)) tokens.push_back(std::string(1, c));
  }
  flush_word(word, tokens);
  return tokens;
}

std::string normalize_for_match(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_space = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    unsigned char u = static_cast<unsigned char>(c);
    if (u == 0xE2 && i + 2 < text.size() &&
        static_cast<unsigned char>(text[i + 1]) == 0x80 &&
        static_cast<unsigned char>(text[i + 2]) == 0x99) {
      c = '\'';
      i += 2;
    }
    if (is_space_byte(c)) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(' ');
    in_space = false;
    out.push_back(
        static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace argmine
