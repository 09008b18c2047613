#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace argmine {

struct SentenceSpan {
  std::string text;    // trimmed sentence text
  std::size_t begin;   // byte offsets into the source string, [begin, end)
  std::size_t end;
};

// Rule-based sentence splitter. Splits after . ! ? when followed by
// whitespace plus an uppercase letter, or by a line break; blank lines always
// split. A guard list protects common abbreviations ("e.g.", "dr.", ...), and
// numeric bullets at the start of a line ("2. ") do not end a sentence.
// Spans are ordered, non-overlapping, and cover every non-whitespace byte.
std::vector<SentenceSpan> segment_sentences(std::string_view text);

// Lowercased tokens. Splits on whitespace and punctuation; punctuation marks
// are kept as single-character tokens ("why ?" -> ["why", "?"]). Contractions
// split Penn-style: "can't" -> ["ca", "n't"], "they've" -> ["they", "'ve"].
std::vector<std::string> tokenize(std::string_view text);

// Lowercase + collapse whitespace runs to single spaces. Used to normalize
// text before approximate quote alignment.
std::string normalize_for_match(std::string_view text);

}  // namespace argmine
