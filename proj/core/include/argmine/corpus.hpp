#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace argmine {

enum class Success { unattacked, unsuccessful, successful };

const char* to_string(Success s);
Success success_from_string(const std::string& s);

struct SentenceRecord {
  std::string post_id;
  int index = 0;                // 0-based position within the post
  std::string text;
  std::vector<std::string> tokens;
  std::size_t begin = 0;        // char span into the post body, [begin, end)
  std::size_t end = 0;
  bool attacked = false;
  Success success = Success::unattacked;
};

struct Post {
  std::string id;
  std::string title;
  std::string body;
  std::string author;
  std::int64_t created_utc = 0;
  std::vector<SentenceRecord> sentences;
  std::optional<int> domain;
};

struct Comment {
  std::string id;
  std::string post_id;
  std::optional<std::string> parent_id;  // absent for top-level comments
  std::string body;
  std::int64_t created_utc = 0;
  bool delta_awarded = false;
};

struct SplitConfig {
  std::int64_t train_end_utc = 0;
  std::int64_t val_end_utc = 0;
  std::int64_t test_end_utc = 0;

  void validate() const;  // throws ConfigError unless strictly increasing
};

enum class Split { train, val, test };

const char* to_string(Split s);

struct Corpus {
  std::vector<Post> posts;        // sorted by (created_utc, id)
  std::vector<Comment> comments;  // sorted by (created_utc, id)

  std::unordered_map<std::string, std::size_t> post_index;     // id -> posts[]
  std::unordered_map<std::string, std::size_t> comment_index;  // id -> comments[]

  const Post* find_post(const std::string& id) const;
  // Top-level comments of a post, in stored order.
  std::vector<const Comment*> top_level_comments(const std::string& post_id) const;
  // Strict descendants of a comment, in stored order.
  std::vector<const Comment*> descendants(const std::string& comment_id) const;

  void rebuild_indexes();
};

// Reads posts and comments from JSONL streams (one object per line).
// Posts require: id, body, created_utc; optional: title, author.
// Comments require: id, post_id, body, created_utc; optional: parent_id,
// delta_awarded. Malformed records and duplicate ids raise DataError with
// the offending line number. Output order is (created_utc, id), so the same
// input always yields the same corpus.
Corpus ingest_posts(std::istream& posts_jsonl, std::istream& comments_jsonl);

// Partition by created_utc: train = utc <= train_end, val = utc <= val_end,
// test = the rest (boundaries inclusive on the left). Empty train split is an
// error.
std::vector<Split> split_corpus(const Corpus& corpus, const SplitConfig& cfg);

// Versioned JSON round-trip of the full corpus (posts, comments, labels).
std::string serialize_corpus(const Corpus& corpus);
Corpus deserialize_corpus(const std::string& json_text);

void save_corpus(const Corpus& corpus, const std::string& path);
Corpus load_corpus(const std::string& path);

}  // namespace argmine
