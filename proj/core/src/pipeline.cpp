#include "argmine/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "argmine/corpus.hpp"
#include "argmine/effects.hpp"
#include "argmine/errors.hpp"
#include "argmine/features.hpp"
#include "argmine/knowledge.hpp"
#include "argmine/labeling.hpp"
#include "argmine/lda.hpp"
#include "argmine/metrics.hpp"
#include "argmine/parallel.hpp"
#include "argmine/ranker.hpp"
#include "argmine/report.hpp"

namespace argmine {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string>& pipeline_stages() {
  static const std::vector<std::string> stages = {
      "ingest", "label",    "topics", "knowledge", "features",
      "effects", "train",   "evaluate", "report"};
  return stages;
}

namespace {

// ---------------------------------------------------------------------------
// Small file helpers.

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out << content;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Artifact paths.

struct Paths {
  std::string out;
  explicit Paths(const PipelineConfig& c) : out(c.out_dir) {}
  std::string corpus() const { return out + "/corpus.json"; }
  std::string labels() const { return out + "/labels.jsonl"; }
  std::string exclusions() const { return out + "/label_exclusions.csv"; }
  std::string lda_domain() const { return out + "/lda_domain.json"; }
  std::string lda_sentence() const { return out + "/lda_sentence.json"; }
  std::string domains() const { return out + "/domains.csv"; }
  std::string top_words() const { return out + "/topics_top_words.txt"; }
  std::string knowledge() const { return out + "/knowledge.csv"; }
  std::string features() const { return out + "/features.csv"; }
  std::string features_meta() const { return out + "/features_meta.json"; }
  std::string ngrams() const { return out + "/ngrams.csv"; }
  std::string ngram_vocab() const { return out + "/ngram_vocab.json"; }
  std::string effects_csv() const { return out + "/effects.csv"; }
  std::string effects_html() const { return out + "/effects.html"; }
  std::string grid() const { return out + "/grid.csv"; }
  std::string model() const { return out + "/model.json"; }
  std::string scores() const { return out + "/scores.csv"; }
  std::string metrics_csv() const { return out + "/metrics.csv"; }
  std::string metrics_txt() const { return out + "/metrics.txt"; }
  std::string report_dir() const { return out + "/report"; }
  std::string manifest() const { return out + "/manifest.json"; }
};

// ---------------------------------------------------------------------------
// Manifest: input hashes per stage make reruns no-ops until something moves.

class Manifest {
 public:
  explicit Manifest(const std::string& path) : path_(path) {
    if (fs::exists(path)) {
      data_ = json::parse(read_file(path), nullptr, false);
      if (data_.is_discarded() || !data_.is_object()) data_ = json::object();
    } else {
      data_ = json::object();
    }
    if (!data_.contains("stages")) data_["stages"] = json::object();
  }

  bool up_to_date(const std::string& stage,
                  const std::vector<std::string>& inputs,
                  const std::vector<std::string>& outputs,
                  const std::string& config_hash) const {
    if (!data_.at("stages").contains(stage)) return false;
    const auto& entry = data_.at("stages").at(stage);
    if (entry.value("config_hash", std::string()) != config_hash) return false;
    if (!entry.contains("inputs")) return false;
    for (const auto& input : inputs) {
      if (!fs::exists(input)) return false;
      if (!entry.at("inputs").contains(input)) return false;
      if (entry.at("inputs").at(input).get<std::string>() != hash_file(input))
        return false;
    }
    for (const auto& output : outputs) {
      if (!fs::exists(output)) return false;
    }
    return true;
  }

  void record(const std::string& stage, const std::vector<std::string>& inputs,
              const std::vector<std::string>& outputs,
              const std::string& config_hash, std::uint64_t seed,
              std::int64_t duration_ms) {
    json entry;
    json in_hashes = json::object();
    for (const auto& input : inputs) in_hashes[input] = hash_file(input);
    entry["inputs"] = std::move(in_hashes);
    entry["outputs"] = outputs;
    entry["config_hash"] = config_hash;
    entry["seed"] = seed;
    entry["duration_ms"] = duration_ms;
    data_["stages"][stage] = std::move(entry);
    write_file(path_, data_.dump(2) + "\n");
  }

 private:
  std::string path_;
  json data_;
};

void require_artifact(const std::string& path, const std::string& stage) {
  if (!fs::exists(path)) {
    throw DataError("missing artifact '" + path + "': run " + stage +
                    " first");
  }
}

// ---------------------------------------------------------------------------
// CSV plumbing (artifacts use unquoted CSV; ids are validated at ingest).

std::vector<std::string> split_line(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

// ---------------------------------------------------------------------------
// The on-disk feature table.

struct FeatureRow {
  std::string sentence_key;
  std::string post_id;
  int sentence_index = 0;
  Split split = Split::train;
  int domain = -1;
  int topic = 0;
  std::array<double, kNumPropositionFeatures> props{};
  std::array<double, kNumToneFeatures> tone{};
  std::array<double, 3> knowledge{};
  std::vector<std::pair<int, double>> ngrams;
};

struct FeatureTable {
  std::vector<FeatureRow> rows;
  std::unordered_map<std::string, std::size_t> by_key;
  int topic_count = 0;  // sentence topics; `topic` ranges over [0, topic_count]
  NgramVocabulary vocab;
};

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "val") return Split::val;
  if (s == "test") return Split::test;
  throw DataError("unknown split label: " + s);
}

std::string feature_table_to_csv(const FeatureTable& table) {
  std::ostringstream os;
  os << "sentence_key,post_id,sentence_index,split,domain,topic";
  for (const auto& name : proposition_names()) os << ",prop_" << name;
  for (const auto& name : tone_names()) os << ",tone_" << name;
  os << ",knowledge_frequency,knowledge_attractiveness,knowledge_extremeness\n";
  for (const auto& r : table.rows) {
    os << r.sentence_key << ',' << r.post_id << ',' << r.sentence_index << ','
       << to_string(r.split) << ',' << r.domain << ',' << r.topic;
    for (double v : r.props) os << ',' << (v != 0.0 ? 1 : 0);
    for (double v : r.tone) os << ',' << format_double(v);
    for (double v : r.knowledge) os << ',' << format_double(v);
    os << '\n';
  }
  return os.str();
}

std::string ngrams_to_csv(const FeatureTable& table) {
  std::ostringstream os;
  os << "sentence_key,ngram_id,weight\n";
  for (const auto& r : table.rows) {
    for (const auto& [id, w] : r.ngrams) {
      os << r.sentence_key << ',' << id << ',' << format_double(w) << '\n';
    }
  }
  return os.str();
}

FeatureTable load_feature_table(const Paths& paths) {
  FeatureTable table;
  table.vocab = NgramVocabulary::deserialize(read_file(paths.ngram_vocab()));
  {
    const json meta = json::parse(read_file(paths.features_meta()));
    if (meta.at("format_version").get<int>() != 1)
      throw DataError("features_meta.json: unsupported format_version");
    table.topic_count = meta.at("sentence_topic_count").get<int>();
  }

  std::istringstream in(read_file(paths.features()));
  std::string line;
  if (!std::getline(in, line)) throw DataError("features.csv is empty");
  const auto header = split_line(line, ',');
  const std::size_t expected =
      6 + kNumPropositionFeatures + kNumToneFeatures + 3;
  if (header.size() != expected)
    throw DataError("features.csv: unexpected column count");

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto parts = split_line(line, ',');
    if (parts.size() != expected)
      throw DataError("features.csv: malformed row");
    FeatureRow r;
    std::size_t c = 0;
    r.sentence_key = parts[c++];
    r.post_id = parts[c++];
    r.sentence_index = std::stoi(parts[c++]);
    r.split = split_from_string(parts[c++]);
    r.domain = std::stoi(parts[c++]);
    r.topic = std::stoi(parts[c++]);
    for (auto& v : r.props) v = std::stod(parts[c++]);
    for (auto& v : r.tone) v = std::stod(parts[c++]);
    for (auto& v : r.knowledge) v = std::stod(parts[c++]);
    table.by_key[r.sentence_key] = table.rows.size();
    table.rows.push_back(std::move(r));
  }

  std::istringstream ngrams_in(read_file(paths.ngrams()));
  if (!std::getline(ngrams_in, line))
    throw DataError("ngrams.csv is empty");
  while (std::getline(ngrams_in, line)) {
    if (line.empty()) continue;
    const auto parts = split_line(line, ',');
    if (parts.size() != 3) throw DataError("ngrams.csv: malformed row");
    auto it = table.by_key.find(parts[0]);
    if (it == table.by_key.end())
      throw DataError("ngrams.csv: unknown sentence " + parts[0]);
    table.rows[it->second].ngrams.emplace_back(std::stoi(parts[1]),
                                               std::stod(parts[2]));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Column layout shared by train / evaluate / report.

struct ColumnLayout {
  std::vector<std::string> names;
  std::vector<int> continuous;
  int tone_base = 0;
  int knowledge_base = 0;
  int topic_base = 0;
  int domain_base = 0;
  int ngram_base = 0;
  std::vector<int> domain_ids;  // sorted; [0] is the reference category
};

ColumnLayout make_layout(int topic_count, const std::vector<int>& domain_ids,
                         const NgramVocabulary& vocab) {
  ColumnLayout layout;
  layout.domain_ids = domain_ids;
  for (const auto& name : proposition_names())
    layout.names.push_back("prop_" + name);
  layout.tone_base = static_cast<int>(layout.names.size());
  for (const auto& name : tone_names())
    layout.names.push_back("tone_" + name);
  layout.knowledge_base = static_cast<int>(layout.names.size());
  layout.names.push_back("knowledge_frequency");
  layout.names.push_back("knowledge_attractiveness");
  layout.names.push_back("knowledge_extremeness");
  layout.topic_base = static_cast<int>(layout.names.size());
  for (int k = 0; k <= topic_count; ++k) {
    layout.names.push_back(k == topic_count ? "topic_unknown"
                                            : "topic_" + std::to_string(k));
  }
  layout.domain_base = static_cast<int>(layout.names.size());
  for (std::size_t i = 1; i < domain_ids.size(); ++i) {
    layout.names.push_back("domain_" + std::to_string(domain_ids[i]));
  }
  layout.ngram_base = static_cast<int>(layout.names.size());
  for (const auto& gram : vocab.ngrams) {
    layout.names.push_back("ngram_" + gram);
  }
  for (int i = 0; i < kNumToneFeatures; ++i) {
    if (i == kSentimentCategory) continue;  // categorical slot stays raw
    layout.continuous.push_back(layout.tone_base + i);
  }
  for (int i = 0; i < 3; ++i)
    layout.continuous.push_back(layout.knowledge_base + i);
  return layout;
}

std::vector<std::pair<int, double>> row_entries(const FeatureRow& r,
                                                const ColumnLayout& layout,
                                                int topic_count) {
  std::vector<std::pair<int, double>> entries;
  for (int i = 0; i < kNumPropositionFeatures; ++i) {
    if (r.props[static_cast<std::size_t>(i)] != 0.0) entries.emplace_back(i, 1.0);
  }
  // Continuous slots always carry entries so standardization can shift them.
  for (int i = 0; i < kNumToneFeatures; ++i) {
    entries.emplace_back(layout.tone_base + i,
                         r.tone[static_cast<std::size_t>(i)]);
  }
  for (int i = 0; i < 3; ++i) {
    entries.emplace_back(layout.knowledge_base + i,
                         r.knowledge[static_cast<std::size_t>(i)]);
  }
  const int topic = std::min(r.topic, topic_count);
  entries.emplace_back(layout.topic_base + topic, 1.0);
  if (r.domain >= 0) {
    auto it = std::lower_bound(layout.domain_ids.begin(),
                               layout.domain_ids.end(), r.domain);
    if (it != layout.domain_ids.end() && *it == r.domain &&
        it != layout.domain_ids.begin()) {
      entries.emplace_back(
          layout.domain_base +
              static_cast<int>(it - layout.domain_ids.begin()) - 1,
          1.0);
    }
  }
  for (const auto& [id, w] : r.ngrams) {
    entries.emplace_back(layout.ngram_base + id, w);
  }
  return entries;
}

RankerDesign build_design(const std::vector<const FeatureRow*>& rows,
                          const ColumnLayout& layout, int topic_count) {
  RankerDesign design;
  design.column_names = layout.names;
  design.continuous_columns = layout.continuous;
  design.x.cols = layout.names.size();
  for (const auto* r : rows) {
    design.x.add_row(row_entries(*r, layout, topic_count));
  }
  return design;
}

// ---------------------------------------------------------------------------
// Label store loaded from labels.jsonl.

struct LabelStore {
  // sentence_key -> (attacked, successful)
  std::unordered_map<std::string, std::pair<bool, bool>> by_key;

  bool attacked(const std::string& key) const {
    auto it = by_key.find(key);
    return it != by_key.end() && it->second.first;
  }
  bool successful(const std::string& key) const {
    auto it = by_key.find(key);
    return it != by_key.end() && it->second.second;
  }
};

LabelStore load_labels(const std::string& path) {
  LabelStore store;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    const std::string key = j.at("post_id").get<std::string>() + ":" +
                            std::to_string(j.at("sentence_index").get<int>());
    store.by_key[key] = {j.at("attacked").get<bool>(),
                         j.at("success").get<std::string>() == "successful"};
  }
  return store;
}

// Posts eligible for the configured ranking task and their positive flags.
struct TaskData {
  std::vector<std::string> post_ids;                     // dataset membership
  std::unordered_map<std::string, bool> post_in_dataset;
};

TaskData task_dataset(const Corpus& corpus, const LabelStore& labels,
                      const std::string& task) {
  TaskData data;
  for (const auto& post : corpus.posts) {
    bool any = false;
    for (const auto& s : post.sentences) {
      const std::string key = post.id + ":" + std::to_string(s.index);
      const bool positive =
          task == "attacked" ? labels.attacked(key) : labels.successful(key);
      any = any || positive;
    }
    if (any) {
      data.post_ids.push_back(post.id);
      data.post_in_dataset[post.id] = true;
    }
  }
  return data;
}

std::vector<int> train_domains(const FeatureTable& table) {
  std::set<int> seen;
  for (const auto& r : table.rows) {
    if (r.split == Split::train && r.domain >= 0) seen.insert(r.domain);
  }
  if (seen.empty()) seen.insert(-1);  // degenerate but keeps layout stable
  return {seen.begin(), seen.end()};
}

std::uint64_t hash_post_set(const std::vector<std::string>& post_ids) {
  std::string joined;
  for (const auto& id : post_ids) {
    joined += id;
    joined.push_back('\n');
  }
  return fnv1a(joined);
}

// ---------------------------------------------------------------------------
// Stage implementations.

struct StageContext {
  const PipelineConfig& config;
  Paths paths;
  int jobs;
  bool quiet;

  void log(const std::string& message) const {
    if (!quiet) std::cerr << "[argmine] " << message << "\n";
  }
};

void stage_ingest(const StageContext& ctx) {
  std::ifstream posts(ctx.config.posts_path);
  if (!posts)
    throw DataError("cannot read posts file: " + ctx.config.posts_path);
  std::ifstream comments(ctx.config.comments_path);
  if (!comments)
    throw DataError("cannot read comments file: " + ctx.config.comments_path);
  Corpus corpus = ingest_posts(posts, comments);
  for (const auto& post : corpus.posts) {
    if (post.id.find(',') != std::string::npos ||
        post.id.find('\n') != std::string::npos) {
      throw DataError("post id '" + post.id +
                      "' contains characters unsupported in artifacts");
    }
  }
  // Fails fast when the configured boundaries leave train empty.
  SplitConfig split{ctx.config.train_end_utc, ctx.config.val_end_utc,
                    ctx.config.test_end_utc};
  split_corpus(corpus, split);
  save_corpus(corpus, ctx.paths.corpus());
  ctx.log("ingest: " + std::to_string(corpus.posts.size()) + " posts, " +
          std::to_string(corpus.comments.size()) + " comments");
}

void stage_label(const StageContext& ctx) {
  require_artifact(ctx.paths.corpus(), "ingest");
  Corpus corpus = load_corpus(ctx.paths.corpus());
  const StopwordSet stopwords = load_stopwords(ctx.config.stopwords_path);
  LabelingConfig cfg;
  cfg.edit_budget = ctx.config.edit_budget;
  cfg.min_coverage = ctx.config.coverage;
  cfg.implicit_overlap = ctx.config.implicit_overlap;
  cfg.max_quotes = ctx.config.max_quotes;
  const auto labelings = label_corpus(corpus, stopwords, cfg, ctx.jobs);
  write_file(ctx.paths.labels(), labels_to_jsonl(corpus, labelings));

  std::ostringstream exclusions;
  exclusions << "post_id,comment_id,reason\n";
  for (std::size_t i = 0; i < corpus.posts.size(); ++i) {
    for (const auto& e : labelings[i].excluded) {
      exclusions << corpus.posts[i].id << ',' << e.comment_id << ','
                 << to_string(e.reason) << '\n';
    }
  }
  write_file(ctx.paths.exclusions(), exclusions.str());

  std::size_t attacked = 0, successful = 0;
  for (const auto& post : corpus.posts) {
    for (const auto& s : post.sentences) {
      attacked += s.attacked ? 1 : 0;
      successful += s.success == Success::successful ? 1 : 0;
    }
  }
  ctx.log("label: " + std::to_string(attacked) + " attacked, " +
          std::to_string(successful) + " successful sentences");
}

std::vector<TokenizedDoc> post_docs(const Corpus& corpus,
                                    const std::vector<std::size_t>& indexes) {
  std::vector<TokenizedDoc> docs;
  docs.reserve(indexes.size());
  for (std::size_t i : indexes) {
    TokenizedDoc doc;
    for (const auto& s : corpus.posts[i].sentences) doc.push_back(s.tokens);
    docs.push_back(std::move(doc));
  }
  return docs;
}

void stage_topics(const StageContext& ctx) {
  require_artifact(ctx.paths.corpus(), "ingest");
  Corpus corpus = load_corpus(ctx.paths.corpus());
  SplitConfig split_cfg{ctx.config.train_end_utc, ctx.config.val_end_utc,
                        ctx.config.test_end_utc};
  const auto splits = split_corpus(corpus, split_cfg);

  std::vector<std::size_t> train_posts, all_posts;
  for (std::size_t i = 0; i < corpus.posts.size(); ++i) {
    all_posts.push_back(i);
    if (splits[i] == Split::train) train_posts.push_back(i);
  }

  LdaConfig domain_cfg;
  domain_cfg.topics = ctx.config.domain_topics;
  domain_cfg.alpha = ctx.config.lda_alpha;
  domain_cfg.beta = ctx.config.lda_beta;
  domain_cfg.iterations = ctx.config.lda_iterations;
  domain_cfg.seed = ctx.config.lda_seed;
  domain_cfg.mode = LdaMode::document;
  ctx.log("topics: training document LDA (K=" +
          std::to_string(domain_cfg.topics) + ")");
  const TopicModel domain_model =
      train_lda(post_docs(corpus, train_posts), domain_cfg);
  domain_model.save(ctx.paths.lda_domain());

  LdaConfig sent_cfg = domain_cfg;
  sent_cfg.topics = ctx.config.sentence_topics;
  sent_cfg.mode = LdaMode::sentence;
  ctx.log("topics: training sentence LDA (K=" +
          std::to_string(sent_cfg.topics) + ")");
  const TopicModel sentence_model =
      train_lda(post_docs(corpus, train_posts), sent_cfg);
  sentence_model.save(ctx.paths.lda_sentence());

  const auto assignment = assign_domains(
      domain_model, post_docs(corpus, all_posts), ctx.config.excluded_topics);
  std::ostringstream domains;
  domains << "post_id,domain\n";
  for (std::size_t i = 0; i < all_posts.size(); ++i) {
    domains << corpus.posts[all_posts[i]].id << ','
            << assignment.domain_of[i] << '\n';
  }
  write_file(ctx.paths.domains(), domains.str());

  std::ostringstream top;
  top << "# document model (domains)\n";
  for (int k = 0; k < domain_model.num_topics(); ++k) {
    top << "topic " << k << ":";
    for (const auto& [word, count] : domain_model.top_words(k, 10)) {
      top << ' ' << word;
    }
    top << '\n';
  }
  top << "\n# sentence model\n";
  for (int k = 0; k < sentence_model.num_topics(); ++k) {
    top << "topic " << k << ":";
    for (const auto& [word, count] : sentence_model.top_words(k, 10)) {
      top << ' ' << word;
    }
    top << '\n';
  }
  write_file(ctx.paths.top_words(), top.str());
  ctx.log("topics: top words per topic written to " + ctx.paths.top_words() +
          " (inspect to pick excluded common-word topics)");
}

void stage_knowledge(const StageContext& ctx) {
  require_artifact(ctx.paths.corpus(), "ingest");
  Corpus corpus = load_corpus(ctx.paths.corpus());
  const StopwordSet stopwords = load_stopwords(ctx.config.stopwords_path);

  KialoIndex index;
  if (!ctx.config.kialo_path.empty()) {
    index = KialoIndex::load(ctx.config.kialo_path, stopwords);
    ctx.log("knowledge: indexed " +
            std::to_string(index.statements().size()) + " statements");
  } else {
    ctx.log("knowledge: no kialo path configured; features default to 0");
  }

  struct RowOut {
    std::string key;
    double freq, attr, extr;
    int n;
  };
  std::vector<std::vector<RowOut>> per_post(corpus.posts.size());
  parallel_for(corpus.posts.size(), ctx.jobs, [&](std::size_t i) {
    const auto& post = corpus.posts[i];
    for (const auto& s : post.sentences) {
      const auto matches =
          retrieve(s.tokens, index, stopwords, ctx.config.knowledge_min_common);
      per_post[i].push_back(
          {post.id + ":" + std::to_string(s.index), frequency_feature(matches),
           attractiveness_feature(matches, index),
           extremeness_feature(matches, index), matches.n()});
    }
  });

  std::ostringstream os;
  os << "sentence_key,frequency,attractiveness,extremeness,n\n";
  for (const auto& rows : per_post) {
    for (const auto& r : rows) {
      os << r.key << ',' << format_double(r.freq) << ','
         << format_double(r.attr) << ',' << format_double(r.extr) << ',' << r.n
         << '\n';
    }
  }
  write_file(ctx.paths.knowledge(), os.str());
}

void stage_features(const StageContext& ctx) {
  require_artifact(ctx.paths.corpus(), "ingest");
  require_artifact(ctx.paths.lda_sentence(), "topics");
  require_artifact(ctx.paths.domains(), "topics");
  require_artifact(ctx.paths.knowledge(), "knowledge");

  Corpus corpus = load_corpus(ctx.paths.corpus());
  const TopicModel sentence_model = TopicModel::load(ctx.paths.lda_sentence());
  SplitConfig split_cfg{ctx.config.train_end_utc, ctx.config.val_end_utc,
                        ctx.config.test_end_utc};
  const auto splits = split_corpus(corpus, split_cfg);

  // domains.csv
  std::unordered_map<std::string, int> domain_of;
  {
    std::istringstream in(read_file(ctx.paths.domains()));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto parts = split_line(line, ',');
      if (parts.size() != 2) throw DataError("domains.csv: malformed row");
      domain_of[parts[0]] = std::stoi(parts[1]);
    }
  }

  // knowledge.csv
  std::unordered_map<std::string, std::array<double, 3>> knowledge_of;
  {
    std::istringstream in(read_file(ctx.paths.knowledge()));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto parts = split_line(line, ',');
      if (parts.size() != 5) throw DataError("knowledge.csv: malformed row");
      knowledge_of[parts[0]] = {std::stod(parts[1]), std::stod(parts[2]),
                                std::stod(parts[3])};
    }
  }

  const PropositionLexicons prop_lex =
      PropositionLexicons::load(ctx.config.lexicon_dir);
  ToneLexicons::Paths tone_paths;
  tone_paths.subjectivity = ctx.config.subjectivity_lexicon;
  tone_paths.concreteness = ctx.config.concreteness_lexicon;
  tone_paths.arousal = ctx.config.arousal_lexicon;
  tone_paths.dominance = ctx.config.dominance_lexicon;
  tone_paths.polarity = ctx.config.polarity_lexicon;
  const ToneLexicons tone_lex =
      ToneLexicons::load(ctx.config.lexicon_dir, tone_paths);
  const SentimentScorer scorer = [&](const std::vector<std::string>& tokens) {
    return default_sentiment(tokens, tone_lex.polarity);
  };

  // n-gram vocabulary over train-split sentences only
  std::vector<std::vector<std::string>> train_sentences;
  for (std::size_t i = 0; i < corpus.posts.size(); ++i) {
    if (splits[i] != Split::train) continue;
    for (const auto& s : corpus.posts[i].sentences)
      train_sentences.push_back(s.tokens);
  }
  const NgramVocabulary vocab =
      fit_ngram_vocab(train_sentences, ctx.config.ngram_max_order,
                      ctx.config.ngram_min_df, "train");
  write_file(ctx.paths.ngram_vocab(), vocab.serialize());
  ctx.log("features: " + std::to_string(vocab.ngrams.size()) + " n-grams");

  FeatureTable table;
  table.vocab = vocab;
  table.topic_count = sentence_model.num_topics();
  std::vector<std::vector<FeatureRow>> per_post(corpus.posts.size());
  parallel_for(corpus.posts.size(), ctx.jobs, [&](std::size_t i) {
    const auto& post = corpus.posts[i];
    for (const auto& s : post.sentences) {
      FeatureRow r;
      r.sentence_key = post.id + ":" + std::to_string(s.index);
      r.post_id = post.id;
      r.sentence_index = s.index;
      r.split = splits[i];
      auto dit = domain_of.find(post.id);
      r.domain = dit == domain_of.end() ? -1 : dit->second;
      r.topic = sentence_topic(sentence_model, s.tokens);
      const auto props = proposition_features(s.text, s.tokens, prop_lex);
      for (int f = 0; f < kNumPropositionFeatures; ++f) {
        r.props[static_cast<std::size_t>(f)] =
            props[static_cast<std::size_t>(f)] ? 1.0 : 0.0;
      }
      const auto tone = tone_features(s.tokens, tone_lex, scorer);
      r.tone = tone.values;
      auto kit = knowledge_of.find(r.sentence_key);
      if (kit != knowledge_of.end()) r.knowledge = kit->second;
      r.ngrams = tfidf(s.tokens, vocab);
      per_post[i].push_back(std::move(r));
    }
  });
  for (auto& rows : per_post) {
    for (auto& r : rows) {
      table.by_key[r.sentence_key] = table.rows.size();
      table.rows.push_back(std::move(r));
    }
  }

  write_file(ctx.paths.features(), feature_table_to_csv(table));
  write_file(ctx.paths.ngrams(), ngrams_to_csv(table));
  json meta;
  meta["format_version"] = 1;
  meta["sentence_topic_count"] = table.topic_count;
  write_file(ctx.paths.features_meta(), meta.dump() + "\n");
}

void stage_effects(const StageContext& ctx) {
  require_artifact(ctx.paths.features(), "features");
  require_artifact(ctx.paths.labels(), "label");
  const FeatureTable table = load_feature_table(ctx.paths);
  const LabelStore labels = load_labels(ctx.paths.labels());

  // The effect analysis runs on train+val sentences of posts with at least
  // one attacked sentence; posts with every topic excluded are dropped.
  std::unordered_map<std::string, bool> post_attacked;
  for (const auto& r : table.rows) {
    if (labels.attacked(r.sentence_key)) post_attacked[r.post_id] = true;
  }
  std::vector<const FeatureRow*> rows;
  for (const auto& r : table.rows) {
    if (r.split == Split::test) continue;
    if (r.domain < 0) continue;
    if (!post_attacked.count(r.post_id)) continue;
    rows.push_back(&r);
  }
  if (rows.empty())
    throw DataError("effects: no attacked posts in train+val splits");

  std::vector<std::uint8_t> attacked, successful;
  std::vector<int> domains;
  for (const auto* r : rows) {
    attacked.push_back(labels.attacked(r->sentence_key) ? 1 : 0);
    successful.push_back(labels.successful(r->sentence_key) ? 1 : 0);
    domains.push_back(r->domain);
  }

  std::vector<EffectColumn> columns;
  for (int f = 0; f < kNumPropositionFeatures; ++f) {
    EffectColumn col;
    col.name = "prop_" + proposition_names()[static_cast<std::size_t>(f)];
    for (const auto* r : rows)
      col.values.push_back(r->props[static_cast<std::size_t>(f)]);
    columns.push_back(std::move(col));
  }
  const char* knowledge_names[3] = {"knowledge_frequency",
                                    "knowledge_attractiveness",
                                    "knowledge_extremeness"};
  for (int f = 0; f < 3; ++f) {
    EffectColumn col;
    col.name = knowledge_names[f];
    for (const auto* r : rows)
      col.values.push_back(r->knowledge[static_cast<std::size_t>(f)]);
    columns.push_back(std::move(col));
  }
  for (int f = 0; f < kNumToneFeatures; ++f) {
    if (f == kSentimentCategory) continue;
    EffectColumn col;
    col.name = "tone_" + tone_names()[static_cast<std::size_t>(f)];
    col.standardize = true;
    for (const auto* r : rows)
      col.values.push_back(r->tone[static_cast<std::size_t>(f)]);
    columns.push_back(std::move(col));
  }
  const char* sentiment_names[3] = {"sentiment_negative", "sentiment_neutral",
                                    "sentiment_positive"};
  for (int f = 0; f < 3; ++f) {
    EffectColumn col;
    col.name = sentiment_names[f];
    const double target = static_cast<double>(f - 1);
    for (const auto* r : rows)
      col.values.push_back(r->tone[kSentimentCategory] == target ? 1.0 : 0.0);
    columns.push_back(std::move(col));
  }
  for (int k = 0; k <= table.topic_count; ++k) {
    EffectColumn col;
    col.name = k == table.topic_count ? "topic_unknown"
                                      : "topic_" + std::to_string(k);
    for (const auto* r : rows)
      col.values.push_back(r->topic == k ? 1.0 : 0.0);
    columns.push_back(std::move(col));
  }

  const auto estimates =
      effects_report(columns, attacked, successful, domains);
  write_file(ctx.paths.effects_csv(), effects_to_csv(estimates));
  write_file(ctx.paths.effects_html(), effects_to_html(estimates));
  ctx.log("effects: " + std::to_string(estimates.size()) + " fits");
}

// Rows of dataset posts for one split (pointers into the table).
std::vector<const FeatureRow*> dataset_rows(const FeatureTable& table,
                                            const TaskData& data, Split split) {
  std::vector<const FeatureRow*> rows;
  for (const auto& r : table.rows) {
    if (r.split != split) continue;
    if (!data.post_in_dataset.count(r.post_id)) continue;
    rows.push_back(&r);
  }
  return rows;
}

std::vector<std::uint8_t> row_labels(const std::vector<const FeatureRow*>& rows,
                                     const LabelStore& labels,
                                     const std::string& task) {
  std::vector<std::uint8_t> y;
  y.reserve(rows.size());
  for (const auto* r : rows) {
    const bool positive = task == "attacked"
                              ? labels.attacked(r->sentence_key)
                              : labels.successful(r->sentence_key);
    y.push_back(positive ? 1 : 0);
  }
  return y;
}

void stage_train(const StageContext& ctx) {
  require_artifact(ctx.paths.features(), "features");
  require_artifact(ctx.paths.labels(), "label");
  require_artifact(ctx.paths.corpus(), "ingest");
  const FeatureTable table = load_feature_table(ctx.paths);
  const LabelStore labels = load_labels(ctx.paths.labels());
  const Corpus corpus = load_corpus(ctx.paths.corpus());
  const TaskData data = task_dataset(corpus, labels, ctx.config.task);

  const ColumnLayout layout =
      make_layout(table.topic_count, train_domains(table), table.vocab);
  const auto train_rows = dataset_rows(table, data, Split::train);
  const auto val_rows = dataset_rows(table, data, Split::val);
  if (train_rows.empty()) throw DataError("train: no training sentences");
  if (val_rows.empty()) throw DataError("train: no validation sentences");

  const RankerDesign train_design =
      build_design(train_rows, layout, table.topic_count);
  const RankerDesign val_design =
      build_design(val_rows, layout, table.topic_count);
  const auto y_train = row_labels(train_rows, labels, ctx.config.task);
  const auto y_val = row_labels(val_rows, labels, ctx.config.task);

  ctx.log("train: grid search over " +
          std::to_string(2 * ctx.config.grid_reg_weights.size()) +
          " configurations (" + std::to_string(train_design.x.rows) +
          " train rows, " + std::to_string(train_design.x.cols) + " columns)");
  const std::uint64_t seed = ctx.config.run_seeds.front();
  const GridResult grid = grid_search(train_design, y_train, val_design, y_val,
                                      ctx.config.grid_reg_weights, seed);
  write_file(ctx.paths.grid(), grid.to_csv());

  const GridEntry& best = grid.entries[grid.chosen];
  RankerModel model =
      train_ranker(train_design, y_train, best.norm, best.reg_weight, seed);
  model.trained_on = "train";
  model.topic_count = table.topic_count;
  model.save(ctx.paths.model());
  std::string note = "train: chose " + std::string(to_string(best.norm)) +
                     " reg=" + std::to_string(best.reg_weight) +
                     " (val AUC=" + std::to_string(best.val_auc) + ")";
  if (best.norm == Norm::l1) {
    note += ", sparsity " + std::to_string(model.sparsity());
  }
  ctx.log(note);
}

struct EvalSystems {
  std::vector<MetricReport> lr, length, random;
};

void stage_evaluate(const StageContext& ctx) {
  require_artifact(ctx.paths.model(), "train");
  require_artifact(ctx.paths.features(), "features");
  require_artifact(ctx.paths.labels(), "label");
  require_artifact(ctx.paths.corpus(), "ingest");
  const FeatureTable table = load_feature_table(ctx.paths);
  const LabelStore labels = load_labels(ctx.paths.labels());
  const Corpus corpus = load_corpus(ctx.paths.corpus());
  const TaskData data = task_dataset(corpus, labels, ctx.config.task);
  const RankerModel trained = RankerModel::load(ctx.paths.model());

  const ColumnLayout layout =
      make_layout(table.topic_count, train_domains(table), table.vocab);
  if (layout.names != trained.column_names) {
    throw DataError(
        "evaluate: feature columns do not match the trained model; re-run "
        "features and train");
  }

  const auto train_rows = dataset_rows(table, data, Split::train);
  const auto test_rows = dataset_rows(table, data, Split::test);
  if (test_rows.empty()) throw DataError("evaluate: no test sentences");
  const RankerDesign train_design =
      build_design(train_rows, layout, table.topic_count);
  const RankerDesign test_design =
      build_design(test_rows, layout, table.topic_count);
  const auto y_train = row_labels(train_rows, labels, ctx.config.task);
  const auto y_test = row_labels(test_rows, labels, ctx.config.task);

  // Group test rows per post, keeping table order.
  std::vector<std::string> post_order;
  std::unordered_map<std::string, std::vector<std::size_t>> rows_of_post;
  for (std::size_t i = 0; i < test_rows.size(); ++i) {
    auto [it, inserted] =
        rows_of_post.try_emplace(test_rows[i]->post_id);
    if (inserted) post_order.push_back(test_rows[i]->post_id);
    it->second.push_back(i);
  }
  const std::uint64_t post_hash = hash_post_set(post_order);

  auto evaluate_scores = [&](const std::string& system,
                             const std::vector<double>& scores,
                             std::uint64_t seed) {
    MetricReport report;
    report.system = system;
    report.seed = seed;
    report.n_posts = post_order.size();
    report.n_sentences = test_rows.size();
    report.post_set_hash = post_hash;
    std::vector<RankingResult> rankings;
    for (const auto& post_id : post_order) {
      const auto& idxs = rows_of_post[post_id];
      std::vector<double> s;
      std::vector<std::uint8_t> rel;
      for (std::size_t i : idxs) {
        s.push_back(scores[i]);
        rel.push_back(y_test[i]);
      }
      rankings.push_back(make_ranking(post_id, s, rel));
    }
    report.p_at_1 = precision_at_1(rankings);
    report.a_at_3 = any_at_3(rankings);
    report.map = mean_average_precision(rankings);
    report.auc = auc(scores, y_test);
    return report;
  };

  EvalSystems systems;
  std::vector<double> first_lr_scores;
  for (std::uint64_t seed : ctx.config.run_seeds) {
    RankerModel model = train_ranker(train_design, y_train, trained.norm,
                                     trained.reg_weight, seed);
    const auto lr_scores = score_sentences(model, test_design);
    if (first_lr_scores.empty()) first_lr_scores = lr_scores;
    systems.lr.push_back(evaluate_scores("lr", lr_scores, seed));

    std::vector<double> length_scores(test_rows.size());
    std::vector<double> random_scores(test_rows.size());
    for (const auto& post_id : post_order) {
      const auto& idxs = rows_of_post[post_id];
      const Post* post = corpus.find_post(post_id);
      const auto rnd = baseline_random(post_id, idxs.size(), seed);
      for (std::size_t j = 0; j < idxs.size(); ++j) {
        const auto* row = test_rows[idxs[j]];
        length_scores[idxs[j]] = static_cast<double>(
            post->sentences[static_cast<std::size_t>(row->sentence_index)]
                .text.size());
        random_scores[idxs[j]] = rnd[j];
      }
    }
    systems.length.push_back(evaluate_scores("length", length_scores, seed));
    systems.random.push_back(evaluate_scores("random", random_scores, seed));
  }

  check_same_posts({systems.lr, systems.length, systems.random});

  std::vector<MetricReport> all_reports;
  for (const auto* group : {&systems.lr, &systems.length, &systems.random}) {
    all_reports.insert(all_reports.end(), group->begin(), group->end());
  }
  write_file(ctx.paths.metrics_csv(), metrics_to_csv(all_reports));
  const std::string summary = compare_systems({summarize_runs(systems.lr),
                                               summarize_runs(systems.length),
                                               summarize_runs(systems.random)});
  write_file(ctx.paths.metrics_txt(), summary);
  if (!ctx.quiet) std::cerr << summary;

  // scores.csv from the first seeded run
  std::ostringstream scores_csv;
  scores_csv << "post_id,sentence_index,score,rank\n";
  for (const auto& post_id : post_order) {
    const auto& idxs = rows_of_post[post_id];
    std::vector<std::size_t> order(idxs.size());
    for (std::size_t j = 0; j < idxs.size(); ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       const double sa = first_lr_scores[idxs[a]];
                       const double sb = first_lr_scores[idxs[b]];
                       if (sa != sb) return sa > sb;
                       return test_rows[idxs[a]]->sentence_index <
                              test_rows[idxs[b]]->sentence_index;
                     });
    std::vector<int> rank(idxs.size());
    for (std::size_t j = 0; j < order.size(); ++j)
      rank[order[j]] = static_cast<int>(j);
    for (std::size_t j = 0; j < idxs.size(); ++j) {
      scores_csv << post_id << ',' << test_rows[idxs[j]]->sentence_index << ','
                 << format_double(first_lr_scores[idxs[j]]) << ',' << rank[j]
                 << '\n';
    }
  }
  write_file(ctx.paths.scores(), scores_csv.str());
}

std::string sanitize_filename(const std::string& id) {
  std::string out;
  for (char c : id) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
        (c >= '0' && c <= '9') || c == '-' || c == '_') {
      out.push_back(c);
    } else {
      out.push_back('_');
    }
  }
  return out;
}

void stage_report(const StageContext& ctx) {
  require_artifact(ctx.paths.model(), "train");
  require_artifact(ctx.paths.features(), "features");
  require_artifact(ctx.paths.labels(), "label");
  require_artifact(ctx.paths.corpus(), "ingest");
  const FeatureTable table = load_feature_table(ctx.paths);
  const LabelStore labels = load_labels(ctx.paths.labels());
  Corpus corpus = load_corpus(ctx.paths.corpus());
  {
    std::istringstream labels_in(read_file(ctx.paths.labels()));
    apply_labels_jsonl(corpus, labels_in);
  }
  const TaskData data = task_dataset(corpus, labels, ctx.config.task);
  const RankerModel model = RankerModel::load(ctx.paths.model());

  const ColumnLayout layout =
      make_layout(table.topic_count, train_domains(table), table.vocab);
  if (layout.names != model.column_names) {
    throw DataError(
        "report: feature columns do not match the trained model; re-run "
        "features and train");
  }

  SplitConfig split_cfg{ctx.config.train_end_utc, ctx.config.val_end_utc,
                        ctx.config.test_end_utc};
  const auto splits = split_corpus(corpus, split_cfg);

  std::string effects_html;
  if (fs::exists(ctx.paths.effects_html()))
    effects_html = read_file(ctx.paths.effects_html());

  std::vector<std::pair<std::string, std::string>> pages;
  int rendered = 0;
  for (std::size_t i = 0;
       i < corpus.posts.size() && rendered < ctx.config.report_max_posts; ++i) {
    if (splits[i] != Split::test) continue;
    const auto& post = corpus.posts[i];
    if (!data.post_in_dataset.count(post.id)) continue;

    std::vector<const FeatureRow*> rows;
    for (const auto& s : post.sentences) {
      const std::string key = post.id + ":" + std::to_string(s.index);
      auto it = table.by_key.find(key);
      if (it == table.by_key.end())
        throw DataError("report: missing features for sentence " + key);
      rows.push_back(&table.rows[it->second]);
    }
    const RankerDesign design = build_design(rows, layout, table.topic_count);
    const auto scores = score_sentences(model, design);
    std::vector<AttributionRow> attributions;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      attributions.push_back(
          attribute(model, design, r, rows[r]->sentence_key));
    }
    const std::string page =
        "post_" + sanitize_filename(post.id) + ".html";
    write_file(ctx.paths.report_dir() + "/" + page,
               render_post_html(post, scores, attributions));
    pages.emplace_back(post.id, page);
    ++rendered;
  }
  write_file(ctx.paths.report_dir() + "/index.html",
             render_index_html(pages, effects_html));
  ctx.log("report: rendered " + std::to_string(pages.size()) + " posts");
}

struct StageSpec {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  void (*run)(const StageContext&);
};

std::vector<std::string> lexicon_inputs(const PipelineConfig& c) {
  std::vector<std::string> files = {
      c.stopwords_path,          c.subjectivity_lexicon, c.concreteness_lexicon,
      c.arousal_lexicon,         c.dominance_lexicon,    c.polarity_lexicon,
  };
  static const char* fixed[] = {
      "question_confusion.regex", "question_why_how.regex",
      "question_other.regex",     "normative.txt",
      "prediction.regex",         "prediction.txt",
      "hypothetical.regex",       "citation.regex",
      "comparison.txt",           "example.regex",
      "definition.txt",           "epistemic_verbs.txt",
      "epistemic_nouns.txt",      "you.txt",
      "qualifiers.tsv",           "hedges.tsv"};
  for (const char* f : fixed) files.push_back(c.lexicon_dir + "/" + f);
  return files;
}

StageSpec stage_spec(const PipelineConfig& c, const Paths& p,
                     const std::string& stage) {
  if (stage == "ingest")
    return {{c.posts_path, c.comments_path}, {p.corpus()}, stage_ingest};
  if (stage == "label")
    return {{p.corpus(), c.stopwords_path},
            {p.labels(), p.exclusions()},
            stage_label};
  if (stage == "topics")
    return {{p.corpus()},
            {p.lda_domain(), p.lda_sentence(), p.domains(), p.top_words()},
            stage_topics};
  if (stage == "knowledge") {
    std::vector<std::string> inputs = {p.corpus(), c.stopwords_path};
    if (!c.kialo_path.empty()) inputs.push_back(c.kialo_path);
    return {std::move(inputs), {p.knowledge()}, stage_knowledge};
  }
  if (stage == "features") {
    std::vector<std::string> inputs = {p.corpus(), p.lda_sentence(),
                                       p.domains(), p.knowledge()};
    for (auto& f : lexicon_inputs(c)) inputs.push_back(f);
    return {std::move(inputs),
            {p.features(), p.features_meta(), p.ngrams(), p.ngram_vocab()},
            stage_features};
  }
  if (stage == "effects")
    return {{p.features(), p.features_meta(), p.ngrams(), p.ngram_vocab(),
             p.labels()},
            {p.effects_csv(), p.effects_html()},
            stage_effects};
  if (stage == "train")
    return {{p.features(), p.features_meta(), p.ngrams(), p.ngram_vocab(),
             p.labels(), p.corpus()},
            {p.grid(), p.model()},
            stage_train};
  if (stage == "evaluate")
    return {{p.model(), p.features(), p.features_meta(), p.ngrams(),
             p.ngram_vocab(), p.labels(), p.corpus()},
            {p.scores(), p.metrics_csv(), p.metrics_txt()},
            stage_evaluate};
  if (stage == "report")
    return {{p.model(), p.features(), p.features_meta(), p.ngrams(),
             p.ngram_vocab(), p.labels(), p.corpus()},
            {p.report_dir() + "/index.html"},
            stage_report};
  throw ConfigError("unknown stage: " + stage);
}

}  // namespace

std::string hash_file(const std::string& path) {
  const std::string content = read_file(path);
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(content);
  return os.str();
}

void run_stage(const PipelineConfig& config, const std::string& stage,
               const StageOptions& options) {
  config.validate();
  if (stage == "all") {
    for (const auto& s : pipeline_stages()) run_stage(config, s, options);
    return;
  }

  Paths paths(config);
  fs::create_directories(paths.out);

  StageContext ctx{config, paths,
                   options.jobs > 0 ? options.jobs
                   : config.jobs > 0
                       ? config.jobs
                       : static_cast<int>(std::thread::hardware_concurrency()),
                   options.quiet};

  const StageSpec spec = stage_spec(config, paths, stage);
  const std::string config_hash =
      std::to_string(fnv1a(config.serialize()));

  Manifest manifest(paths.manifest());
  if (!options.force &&
      manifest.up_to_date(stage, spec.inputs, spec.outputs, config_hash)) {
    ctx.log(stage + ": up to date");
    return;
  }

  const auto start = std::chrono::steady_clock::now();
  spec.run(ctx);
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  manifest.record(stage, spec.inputs, spec.outputs, config_hash,
                  config.run_seeds.empty() ? 0 : config.run_seeds.front(),
                  elapsed);
  ctx.log(stage + ": done in " + std::to_string(elapsed) + " ms");
}

}  // namespace argmine
