#include "argmine/config.hpp"

#include <fstream>
#include <sstream>

#include "argmine/errors.hpp"

namespace argmine {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!trim(cur).empty()) parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!trim(cur).empty()) parts.push_back(trim(cur));
  return parts;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os << ',';
    os << values[i];
  }
  return os.str();
}

}  // namespace

PipelineConfig PipelineConfig::parse(const std::string& text) {
  PipelineConfig c;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "paths.posts") c.posts_path = value;
      else if (key == "paths.comments") c.comments_path = value;
      else if (key == "paths.kialo") c.kialo_path = value;
      else if (key == "paths.lexicon_dir") c.lexicon_dir = value;
      else if (key == "paths.stopwords") c.stopwords_path = value;
      else if (key == "paths.out_dir") c.out_dir = value;
      else if (key == "lexicons.subjectivity") c.subjectivity_lexicon = value;
      else if (key == "lexicons.concreteness") c.concreteness_lexicon = value;
      else if (key == "lexicons.arousal") c.arousal_lexicon = value;
      else if (key == "lexicons.dominance") c.dominance_lexicon = value;
      else if (key == "lexicons.polarity") c.polarity_lexicon = value;
      else if (key == "split.train_end_utc") c.train_end_utc = std::stoll(value);
      else if (key == "split.val_end_utc") c.val_end_utc = std::stoll(value);
      else if (key == "split.test_end_utc") c.test_end_utc = std::stoll(value);
      else if (key == "lda.domain_topics") c.domain_topics = std::stoi(value);
      else if (key == "lda.sentence_topics") c.sentence_topics = std::stoi(value);
      else if (key == "lda.alpha") c.lda_alpha = std::stod(value);
      else if (key == "lda.beta") c.lda_beta = std::stod(value);
      else if (key == "lda.iterations") c.lda_iterations = std::stoi(value);
      else if (key == "lda.seed") c.lda_seed = std::stoull(value);
      else if (key == "lda.excluded_topics") {
        c.excluded_topics.clear();
        for (const auto& part : split_csv(value))
          c.excluded_topics.push_back(std::stoi(part));
      } else if (key == "label.edit_budget") c.edit_budget = std::stoi(value);
      else if (key == "label.coverage") c.coverage = std::stod(value);
      else if (key == "label.implicit_overlap")
        c.implicit_overlap = std::stoi(value);
      else if (key == "label.max_quotes") c.max_quotes = std::stoi(value);
      else if (key == "knowledge.min_common")
        c.knowledge_min_common = std::stoi(value);
      else if (key == "ngram.min_df") c.ngram_min_df = std::stoi(value);
      else if (key == "ngram.max_order") c.ngram_max_order = std::stoi(value);
      else if (key == "task") c.task = value;
      else if (key == "grid.reg_weights") {
        c.grid_reg_weights.clear();
        for (const auto& part : split_csv(value))
          c.grid_reg_weights.push_back(std::stod(part));
      } else if (key == "run.seeds") {
        c.run_seeds.clear();
        for (const auto& part : split_csv(value))
          c.run_seeds.push_back(std::stoull(part));
      } else if (key == "report.max_posts")
        c.report_max_posts = std::stoi(value);
      else if (key == "jobs") c.jobs = std::stoi(value);
      else {
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": unknown key '" + key + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": invalid value for '" + key + "'");
    }
  }
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string PipelineConfig::serialize() const {
  std::ostringstream os;
  os.precision(17);
  os << "paths.posts = " << posts_path << "\n";
  os << "paths.comments = " << comments_path << "\n";
  os << "paths.kialo = " << kialo_path << "\n";
  os << "paths.lexicon_dir = " << lexicon_dir << "\n";
  os << "paths.stopwords = " << stopwords_path << "\n";
  os << "paths.out_dir = " << out_dir << "\n";
  os << "lexicons.subjectivity = " << subjectivity_lexicon << "\n";
  os << "lexicons.concreteness = " << concreteness_lexicon << "\n";
  os << "lexicons.arousal = " << arousal_lexicon << "\n";
  os << "lexicons.dominance = " << dominance_lexicon << "\n";
  os << "lexicons.polarity = " << polarity_lexicon << "\n";
  os << "split.train_end_utc = " << train_end_utc << "\n";
  os << "split.val_end_utc = " << val_end_utc << "\n";
  os << "split.test_end_utc = " << test_end_utc << "\n";
  os << "lda.domain_topics = " << domain_topics << "\n";
  os << "lda.sentence_topics = " << sentence_topics << "\n";
  os << "lda.alpha = " << lda_alpha << "\n";
  os << "lda.beta = " << lda_beta << "\n";
  os << "lda.iterations = " << lda_iterations << "\n";
  os << "lda.seed = " << lda_seed << "\n";
  os << "lda.excluded_topics = " << join(excluded_topics) << "\n";
  os << "label.edit_budget = " << edit_budget << "\n";
  os << "label.coverage = " << coverage << "\n";
  os << "label.implicit_overlap = " << implicit_overlap << "\n";
  os << "label.max_quotes = " << max_quotes << "\n";
  os << "knowledge.min_common = " << knowledge_min_common << "\n";
  os << "ngram.min_df = " << ngram_min_df << "\n";
  os << "ngram.max_order = " << ngram_max_order << "\n";
  os << "task = " << task << "\n";
  os << "grid.reg_weights = " << join(grid_reg_weights) << "\n";
  os << "run.seeds = " << join(run_seeds) << "\n";
  os << "report.max_posts = " << report_max_posts << "\n";
  os << "jobs = " << jobs << "\n";
  return os.str();
}

void PipelineConfig::validate() const {
  if (out_dir.empty()) throw ConfigError("config: paths.out_dir is required");
  if (edit_budget < 0) throw ConfigError("config: label.edit_budget < 0");
  if (coverage <= 0.0 || coverage > 1.0)
    throw ConfigError("config: label.coverage must be in (0, 1]");
  if (implicit_overlap <= 0)
    throw ConfigError("config: label.implicit_overlap must be positive");
  if (max_quotes <= 0)
    throw ConfigError("config: label.max_quotes must be positive");
  if (knowledge_min_common <= 0)
    throw ConfigError("config: knowledge.min_common must be positive");
  if (ngram_min_df <= 0)
    throw ConfigError("config: ngram.min_df must be positive");
  if (ngram_max_order < 1 || ngram_max_order > 5)
    throw ConfigError("config: ngram.max_order must be in [1, 5]");
  if (task != "attacked" && task != "successful")
    throw ConfigError("config: task must be 'attacked' or 'successful'");
  if (grid_reg_weights.empty())
    throw ConfigError("config: grid.reg_weights is empty");
  if (run_seeds.empty()) throw ConfigError("config: run.seeds is empty");
  if (domain_topics < 2 || sentence_topics < 2)
    throw ConfigError("config: LDA topic counts must be >= 2");
}

}  // namespace argmine
