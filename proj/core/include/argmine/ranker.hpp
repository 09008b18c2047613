#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace argmine {

// Compressed sparse rows. Continuous columns must carry explicit entries even
// when the raw value is 0, so that standardization can shift them.
struct SparseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_begin;  // rows + 1 offsets
  std::vector<int> col;
  std::vector<double> val;

  void add_row(const std::vector<std::pair<int, double>>& entries);
};

struct RankerDesign {
  std::vector<std::string> column_names;
  std::vector<int> continuous_columns;  // z-scored with train statistics
  SparseMatrix x;
};

enum class Norm { l1, l2 };

const char* to_string(Norm n);

struct StandardizationStats {
  std::map<int, std::pair<double, double>> mean_sd;  // column -> (mean, sd)
};

StandardizationStats compute_standardization(const RankerDesign& design);
void apply_standardization(SparseMatrix& x, const StandardizationStats& stats);

struct RankerModel {
  std::vector<std::string> column_names;
  std::vector<double> weights;
  double intercept = 0.0;
  Norm norm = Norm::l2;
  double reg_weight = 0.1;
  std::uint64_t seed = 0;
  StandardizationStats standardization;
  std::string trained_on;  // split id
  int topic_count = 0;
  int iterations = 0;
  double final_objective = 0.0;

  double sparsity() const;  // fraction of exactly-zero weights

  std::string serialize() const;
  static RankerModel deserialize(const std::string& json_text);
  void save(const std::string& path) const;
  static RankerModel load(const std::string& path);
};

struct TrainOptions {
  int max_iterations = 0;     // 0 -> solver default
  double tolerance = 1e-8;
  std::vector<double>* objective_trace = nullptr;  // test hook
};

// Regularized logistic loss, deterministic for fixed inputs and seed.
// L2 runs penalized Newton with conjugate-gradient steps; L1 runs proximal
// gradient with a backtracking step size. The intercept is never penalized.
// The objective decreases monotonically across accepted steps.
RankerModel train_ranker(const RankerDesign& design,
                         const std::vector<std::uint8_t>& labels, Norm norm,
                         double reg_weight, std::uint64_t seed,
                         const TrainOptions& options = {});

// Sigmoid of the linear score per row; the model's standardization is applied
// to the raw design first. Raises ConfigError on column mismatch.
std::vector<double> score_sentences(const RankerModel& model,
                                    const RankerDesign& design);

struct GridEntry {
  Norm norm = Norm::l2;
  double reg_weight = 0.0;
  double val_auc = 0.0;
};

struct GridResult {
  std::vector<GridEntry> entries;
  std::size_t chosen = 0;

  std::string to_csv() const;
};

// Trains every (norm, reg) configuration once and picks the best validation
// AUC. Ties: smaller reg weight, then L2 before L1.
GridResult grid_search(const RankerDesign& train,
                       const std::vector<std::uint8_t>& y_train,
                       const RankerDesign& val,
                       const std::vector<std::uint8_t>& y_val,
                       const std::vector<double>& reg_grid = {1e-4, 1e-3, 1e-2,
                                                              1e-1},
                       std::uint64_t seed = 0);

// Baselines. Length scores by character count; random scores are uniform and
// deterministic per (post id, seed).
std::vector<double> baseline_length(const std::vector<std::string>& sentences);
std::vector<double> baseline_random(const std::string& post_id,
                                    std::size_t n_sentences,
                                    std::uint64_t seed);

}  // namespace argmine
