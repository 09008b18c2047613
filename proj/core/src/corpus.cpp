#include "argmine/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "argmine/errors.hpp"
#include "argmine/text.hpp"

namespace argmine {

using nlohmann::json;

const char* to_string(Success s) {
  switch (s) {
    case Success::unattacked: return "unattacked";
    case Success::unsuccessful: return "unsuccessful";
    case Success::successful: return "successful";
  }
  return "unattacked";
}

Success success_from_string(const std::string& s) {
  if (s == "successful") return Success::successful;
  if (s == "unsuccessful") return Success::unsuccessful;
  if (s == "unattacked") return Success::unattacked;
  throw DataError("unknown success label: " + s);
}

const char* to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "train";
}

void SplitConfig::validate() const {
  if (!(train_end_utc < val_end_utc && val_end_utc < test_end_utc)) {
    throw ConfigError("split timestamps must be strictly increasing");
  }
}

const Post* Corpus::find_post(const std::string& id) const {
  auto it = post_index.find(id);
  return it == post_index.end() ? nullptr : &posts[it->second];
}

std::vector<const Comment*> Corpus::top_level_comments(
    const std::string& post_id) const {
  std::vector<const Comment*> out;
  for (const auto& c : comments) {
    if (c.post_id == post_id && !c.parent_id.has_value()) out.push_back(&c);
  }
  return out;
}

std::vector<const Comment*> Corpus::descendants(
    const std::string& comment_id) const {
  std::vector<const Comment*> out;
  // Comment trees are shallow; a fixed-point pass keeps stored order.
  std::unordered_map<std::string, bool> in_tree;
  in_tree[comment_id] = true;
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& c : comments) {
      if (!c.parent_id) continue;
      if (in_tree.count(c.id)) continue;
      if (in_tree.count(*c.parent_id)) {
        in_tree[c.id] = true;
        grew = true;
      }
    }
  }
  for (const auto& c : comments) {
    if (c.id != comment_id && in_tree.count(c.id)) out.push_back(&c);
  }
  return out;
}

void Corpus::rebuild_indexes() {
  post_index.clear();
  comment_index.clear();
  for (std::size_t i = 0; i < posts.size(); ++i) post_index[posts[i].id] = i;
  for (std::size_t i = 0; i < comments.size(); ++i)
    comment_index[comments[i].id] = i;
}

namespace {

void segment_post(Post& post) {
  post.sentences.clear();
  int index = 0;
  for (const auto& span : segment_sentences(post.body)) {
    SentenceRecord rec;
    rec.post_id = post.id;
    rec.index = index++;
    rec.text = span.text;
    rec.begin = span.begin;
    rec.end = span.end;
    rec.tokens = tokenize(rec.text);
    post.sentences.push_back(std::move(rec));
  }
}

json parse_line(const std::string& line, const char* what, std::size_t lineno) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    std::ostringstream os;
    os << what << " line " << lineno << ": not a JSON object";
    throw DataError(os.str());
  }
  return j;
}

std::string require_string(const json& j, const char* field, const char* what,
                           std::size_t lineno) {
  if (!j.contains(field) || !j.at(field).is_string()) {
    std::ostringstream os;
    os << what << " line " << lineno << ": missing or invalid field '" << field
       << "'";
    throw DataError(os.str());
  }
  return j.at(field).get<std::string>();
}

std::int64_t require_int(const json& j, const char* field, const char* what,
                         std::size_t lineno) {
  if (!j.contains(field) || !j.at(field).is_number_integer()) {
    std::ostringstream os;
    os << what << " line " << lineno << ": missing or invalid field '" << field
       << "'";
    throw DataError(os.str());
  }
  return j.at(field).get<std::int64_t>();
}

}  // namespace

Corpus ingest_posts(std::istream& posts_jsonl, std::istream& comments_jsonl) {
  Corpus corpus;
  std::string line;
  std::size_t lineno = 0;
  std::unordered_map<std::string, std::size_t> seen_post_line;

  while (std::getline(posts_jsonl, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = parse_line(line, "posts", lineno);
    Post post;
    post.id = require_string(j, "id", "posts", lineno);
    post.body = require_string(j, "body", "posts", lineno);
    post.created_utc = require_int(j, "created_utc", "posts", lineno);
    if (post.created_utc <= 0) {
      std::ostringstream os;
      os << "posts line " << lineno << ": field 'created_utc' must be > 0";
      throw DataError(os.str());
    }
    if (j.contains("title") && j.at("title").is_string())
      post.title = j.at("title").get<std::string>();
    if (j.contains("author") && j.at("author").is_string())
      post.author = j.at("author").get<std::string>();
    auto [it, inserted] = seen_post_line.emplace(post.id, lineno);
    if (!inserted) {
      std::ostringstream os;
      os << "posts line " << lineno << ": duplicate post id '" << post.id
         << "' (first seen at line " << it->second << ")";
      throw DataError(os.str());
    }
    segment_post(post);
    corpus.posts.push_back(std::move(post));
  }

  lineno = 0;
  std::unordered_map<std::string, std::size_t> seen_comment_line;
  while (std::getline(comments_jsonl, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = parse_line(line, "comments", lineno);
    Comment c;
    c.id = require_string(j, "id", "comments", lineno);
    c.post_id = require_string(j, "post_id", "comments", lineno);
    c.body = require_string(j, "body", "comments", lineno);
    c.created_utc = require_int(j, "created_utc", "comments", lineno);
    if (j.contains("parent_id") && j.at("parent_id").is_string())
      c.parent_id = j.at("parent_id").get<std::string>();
    if (j.contains("delta_awarded") && j.at("delta_awarded").is_boolean())
      c.delta_awarded = j.at("delta_awarded").get<bool>();
    auto [it, inserted] = seen_comment_line.emplace(c.id, lineno);
    if (!inserted) {
      std::ostringstream os;
      os << "comments line " << lineno << ": duplicate comment id '" << c.id
         << "' (first seen at line " << it->second << ")";
      throw DataError(os.str());
    }
    corpus.comments.push_back(std::move(c));
  }

  auto by_time_id = [](const auto& a, const auto& b) {
    if (a.created_utc != b.created_utc) return a.created_utc < b.created_utc;
    return a.id < b.id;
  };
  std::sort(corpus.posts.begin(), corpus.posts.end(), by_time_id);
  std::sort(corpus.comments.begin(), corpus.comments.end(), by_time_id);
  corpus.rebuild_indexes();

  // Parent chains must be acyclic and terminate at the post.
  for (const auto& c : corpus.comments) {
    const Comment* cur = &c;
    std::size_t hops = 0;
    while (cur->parent_id) {
      auto it = corpus.comment_index.find(*cur->parent_id);
      if (it == corpus.comment_index.end()) {
        throw DataError("comment '" + c.id + "': parent '" + *cur->parent_id +
                        "' not found");
      }
      cur = &corpus.comments[it->second];
      if (++hops > corpus.comments.size()) {
        throw DataError("comment '" + c.id + "': parent chain has a cycle");
      }
    }
    if (!corpus.post_index.count(cur->post_id)) {
      throw DataError("comment '" + c.id + "': post '" + cur->post_id +
                      "' not found");
    }
  }
  return corpus;
}

std::vector<Split> split_corpus(const Corpus& corpus, const SplitConfig& cfg) {
  cfg.validate();
  std::vector<Split> out(corpus.posts.size(), Split::test);
  std::size_t n_train = 0;
  for (std::size_t i = 0; i < corpus.posts.size(); ++i) {
    const auto utc = corpus.posts[i].created_utc;
    if (utc <= cfg.train_end_utc) {
      out[i] = Split::train;
      ++n_train;
    } else if (utc <= cfg.val_end_utc) {
      out[i] = Split::val;
    } else {
      out[i] = Split::test;
    }
  }
  if (!corpus.posts.empty() && n_train == 0) {
    throw DataError("empty train split");
  }
  return out;
}

namespace {

json sentence_to_json(const SentenceRecord& s) {
  json j;
  j["index"] = s.index;
  j["text"] = s.text;
  j["tokens"] = s.tokens;
  j["begin"] = s.begin;
  j["end"] = s.end;
  j["attacked"] = s.attacked;
  j["success"] = to_string(s.success);
  return j;
}

SentenceRecord sentence_from_json(const json& j, const std::string& post_id) {
  SentenceRecord s;
  s.post_id = post_id;
  s.index = j.at("index").get<int>();
  s.text = j.at("text").get<std::string>();
  s.tokens = j.at("tokens").get<std::vector<std::string>>();
  s.begin = j.at("begin").get<std::size_t>();
  s.end = j.at("end").get<std::size_t>();
  s.attacked = j.at("attacked").get<bool>();
  s.success = success_from_string(j.at("success").get<std::string>());
  return s;
}

}  // namespace

std::string serialize_corpus(const Corpus& corpus) {
  json root;
  root["format_version"] = 1;
  json posts = json::array();
  for (const auto& p : corpus.posts) {
    json jp;
    jp["id"] = p.id;
    jp["title"] = p.title;
    jp["body"] = p.body;
    jp["author"] = p.author;
    jp["created_utc"] = p.created_utc;
    if (p.domain) jp["domain"] = *p.domain;
    json sentences = json::array();
    for (const auto& s : p.sentences) sentences.push_back(sentence_to_json(s));
    jp["sentences"] = std::move(sentences);
    posts.push_back(std::move(jp));
  }
  root["posts"] = std::move(posts);
  json comments = json::array();
  for (const auto& c : corpus.comments) {
    json jc;
    jc["id"] = c.id;
    jc["post_id"] = c.post_id;
    if (c.parent_id) jc["parent_id"] = *c.parent_id;
    jc["body"] = c.body;
    jc["created_utc"] = c.created_utc;
    jc["delta_awarded"] = c.delta_awarded;
    comments.push_back(std::move(jc));
  }
  root["comments"] = std::move(comments);
  return root.dump(2) + "\n";
}

Corpus deserialize_corpus(const std::string& json_text) {
  json root = json::parse(json_text);
  if (!root.contains("format_version") ||
      root.at("format_version").get<int>() != 1) {
    throw DataError("corpus file: unsupported format_version");
  }
  Corpus corpus;
  for (const auto& jp : root.at("posts")) {
    Post p;
    p.id = jp.at("id").get<std::string>();
    p.title = jp.value("title", std::string());
    p.body = jp.at("body").get<std::string>();
    p.author = jp.value("author", std::string());
    p.created_utc = jp.at("created_utc").get<std::int64_t>();
    if (jp.contains("domain")) p.domain = jp.at("domain").get<int>();
    for (const auto& js : jp.at("sentences"))
      p.sentences.push_back(sentence_from_json(js, p.id));
    corpus.posts.push_back(std::move(p));
  }
  for (const auto& jc : root.at("comments")) {
    Comment c;
    c.id = jc.at("id").get<std::string>();
    c.post_id = jc.at("post_id").get<std::string>();
    if (jc.contains("parent_id"))
      c.parent_id = jc.at("parent_id").get<std::string>();
    c.body = jc.at("body").get<std::string>();
    c.created_utc = jc.at("created_utc").get<std::int64_t>();
    c.delta_awarded = jc.value("delta_awarded", false);
    corpus.comments.push_back(std::move(c));
  }
  corpus.rebuild_indexes();
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write corpus file: " + path);
  out << serialize_corpus(corpus);
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read corpus file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_corpus(buf.str());
}

}  // namespace argmine
