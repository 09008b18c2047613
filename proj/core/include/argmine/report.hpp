#pragma once

#include <string>
#include <vector>

#include "argmine/corpus.hpp"
#include "argmine/ranker.hpp"

namespace argmine {

struct Contribution {
  std::string feature;
  double value = 0.0;  // weight * standardized feature value
};

struct AttributionRow {
  std::string sentence_key;
  double score = 0.0;       // sigmoid of the linear score
  double presigmoid = 0.0;  // intercept + sum of contributions
  std::vector<Contribution> contributions;  // sorted by |value| descending
  bool gold_attacked = false;
  bool gold_successful = false;
};

// Exact linear decomposition of one scored row: contribution = weight * value
// per nonzero feature. intercept + sum(contributions) equals the pre-sigmoid
// score.
AttributionRow attribute(const RankerModel& model, const RankerDesign& design,
                         std::size_t row, const std::string& sentence_key);

// Self-contained HTML for one post: sentences shaded red (low) to blue (high)
// by min-max normalized score within the post, successfully attacked
// sentences underlined, top +-3 feature contributions listed per sentence.
// Equal scores across the post render mid-scale. Deterministic bytes.
std::string render_post_html(const Post& post,
                             const std::vector<double>& scores,
                             const std::vector<AttributionRow>& attributions);

// Index page linking per-post reports; the effects table HTML is embedded
// when non-empty.
std::string render_index_html(
    const std::vector<std::pair<std::string, std::string>>& post_pages,
    const std::string& effects_table_html);

// Fixed scale endpoints (low -> high), exposed for golden-file tests.
extern const char* const kReportColorLow;   // red
extern const char* const kReportColorHigh;  // blue

}  // namespace argmine
