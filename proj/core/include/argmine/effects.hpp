#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace argmine {

struct EffectEstimate {
  std::string feature;
  std::string response;  // "attacked" or "successful"
  double beta = 0.0;
  double odds_ratio = 1.0;
  double std_error = 0.0;
  double wald_z = 0.0;
  double p_value = 1.0;
  std::string stars;  // "", "*", "**", "***"
  std::size_t n_obs = 0;
  bool standardized = false;
  bool ridged = false;
  bool skipped = false;  // set by effects_report when a fit is impossible
  std::string note;      // skip reason
};

std::string significance_stars(double p_value);

// Fits log odds(Y) = b0 + bX * X + domain dummies (reference category
// dropped) and reports the X coefficient with its Wald test. Continuous
// features are z-scored first when `standardize` is set. A feature with no
// variation inside any domain raises NumericError.
EffectEstimate feature_effect(const std::vector<double>& feature,
                              const std::vector<std::uint8_t>& labels,
                              const std::vector<int>& domain_ids,
                              bool standardize, const std::string& feature_name,
                              const std::string& response_name);

struct EffectColumn {
  std::string name;
  std::vector<double> values;
  bool standardize = false;  // continuous features get z-scored
};

// One fit per feature per response. `attacked` runs over all observations,
// `successful` over attacked observations only. Features whose fit is
// impossible (no within-domain variation, exact collinearity, divergence)
// come back as skipped rows carrying the reason.
std::vector<EffectEstimate> effects_report(
    const std::vector<EffectColumn>& features,
    const std::vector<std::uint8_t>& attacked_labels,
    const std::vector<std::uint8_t>& successful_labels,
    const std::vector<int>& domain_ids);

// Identical numbers in both emissions.
std::string effects_to_csv(const std::vector<EffectEstimate>& estimates);
std::string effects_to_html(const std::vector<EffectEstimate>& estimates);

}  // namespace argmine
