#include "argmine/effects.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "argmine/errors.hpp"
#include "argmine/logistic.hpp"

namespace argmine {

std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

EffectEstimate feature_effect(const std::vector<double>& feature,
                              const std::vector<std::uint8_t>& labels,
                              const std::vector<int>& domain_ids,
                              bool standardize, const std::string& feature_name,
                              const std::string& response_name) {
  const std::size_t n = feature.size();
  if (n == 0) throw ConfigError("feature_effect: no observations");
  if (labels.size() != n || domain_ids.size() != n)
    throw ConfigError("feature_effect: length mismatch");

  // Within-domain variation check.
  std::map<int, std::pair<double, bool>> domain_first;  // value, varies
  bool varies_somewhere = false;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = domain_first.emplace(domain_ids[i],
                                               std::make_pair(feature[i], false));
    if (!inserted && !it->second.second && feature[i] != it->second.first) {
      it->second.second = true;
      varies_somewhere = true;
    }
  }
  if (!varies_somewhere) {
    throw NumericError("feature_effect: no within-domain variation for '" +
                       feature_name + "'");
  }

  std::vector<double> x = feature;
  if (standardize) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double sq = 0.0;
    for (double v : x) sq += (v - mean) * (v - mean);
    const double sd = std::sqrt(sq / static_cast<double>(n));
    for (double& v : x) v = sd > 0.0 ? (v - mean) / sd : 0.0;
  }

  // Reference-category encoding: first domain (sorted) is dropped.
  std::vector<int> domains;
  for (const auto& [d, _] : domain_first) domains.push_back(d);
  std::sort(domains.begin(), domains.end());
  const std::size_t n_dummies = domains.size() - 1;

  DenseDesign design;
  design.rows = n;
  design.cols = 2 + n_dummies;
  design.values.assign(design.rows * design.cols, 0.0);
  design.col_names.push_back("(intercept)");
  design.col_names.push_back(feature_name);
  for (std::size_t d = 1; d < domains.size(); ++d) {
    design.col_names.push_back("domain_" + std::to_string(domains[d]));
  }
  for (std::size_t i = 0; i < n; ++i) {
    design.at(i, 0) = 1.0;
    design.at(i, 1) = x[i];
    const auto pos = std::lower_bound(domains.begin(), domains.end(),
                                      domain_ids[i]) -
                     domains.begin();
    if (pos > 0) design.at(i, 2 + static_cast<std::size_t>(pos) - 1) = 1.0;
  }

  const LogisticFit fit = fit_logistic_mle(design, labels);
  const double beta = fit.beta[1];
  const double se = fit.std_error(1, design.cols);
  const auto [z, p] = wald_test(beta, se);

  EffectEstimate est;
  est.feature = feature_name;
  est.response = response_name;
  est.beta = beta;
  est.odds_ratio = std::exp(beta);
  est.std_error = se;
  est.wald_z = z;
  est.p_value = p;
  est.stars = significance_stars(p);
  est.n_obs = n;
  est.standardized = standardize;
  est.ridged = fit.ridged;
  return est;
}

std::vector<EffectEstimate> effects_report(
    const std::vector<EffectColumn>& features,
    const std::vector<std::uint8_t>& attacked_labels,
    const std::vector<std::uint8_t>& successful_labels,
    const std::vector<int>& domain_ids) {
  const std::size_t n = attacked_labels.size();
  if (successful_labels.size() != n || domain_ids.size() != n)
    throw ConfigError("effects_report: length mismatch");

  // The "successful" response is fit over attacked observations only.
  std::vector<std::size_t> attacked_rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (attacked_labels[i]) attacked_rows.push_back(i);
  }

  auto fit_or_skip = [](const std::vector<double>& x,
                        const std::vector<std::uint8_t>& y,
                        const std::vector<int>& d, bool standardize,
                        const std::string& name, const std::string& response) {
    // A label column with a single class is as unfittable as a constant
    // feature; both become audit rows instead of aborting the report.
    bool has_pos = false, has_neg = false;
    for (auto v : y) (v ? has_pos : has_neg) = true;
    try {
      if (!has_pos || !has_neg) throw NumericError("single-class response");
      return feature_effect(x, y, d, standardize, name, response);
    } catch (const NumericError& e) {
      EffectEstimate est;
      est.feature = name;
      est.response = response;
      est.n_obs = x.size();
      est.standardized = standardize;
      est.skipped = true;
      std::string why = e.what();
      if (why.find("no within-domain variation") != std::string::npos) {
        est.note = "no_within_domain_variation";
      } else if (why.find("collinear") != std::string::npos) {
        est.note = "collinear";
      } else if (why.find("single-class") != std::string::npos) {
        est.note = "single_class_response";
      } else {
        est.note = "fit_failed";
      }
      return est;
    }
  };

  std::vector<EffectEstimate> out;
  for (const auto& col : features) {
    if (col.values.size() != n)
      throw ConfigError("effects_report: column '" + col.name +
                        "' length mismatch");
    out.push_back(fit_or_skip(col.values, attacked_labels, domain_ids,
                              col.standardize, col.name, "attacked"));
    std::vector<double> x;
    std::vector<std::uint8_t> y;
    std::vector<int> d;
    x.reserve(attacked_rows.size());
    for (std::size_t i : attacked_rows) {
      x.push_back(col.values[i]);
      y.push_back(successful_labels[i]);
      d.push_back(domain_ids[i]);
    }
    out.push_back(
        fit_or_skip(x, y, d, col.standardize, col.name, "successful"));
  }
  return out;
}

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::string effects_to_csv(const std::vector<EffectEstimate>& estimates) {
  std::ostringstream os;
  os << "feature,response,beta,or,se,z,p,stars,n_obs,flags\n";
  for (const auto& e : estimates) {
    std::string flags;
    auto add_flag = [&](const std::string& f) {
      flags += flags.empty() ? f : ";" + f;
    };
    if (e.standardized) add_flag("standardized");
    if (e.ridged) add_flag("ridged");
    if (e.skipped) add_flag("skipped:" + e.note);
    if (e.skipped) {
      os << e.feature << ',' << e.response << ",,,,,,," << e.n_obs << ','
         << flags << '\n';
      continue;
    }
    os << e.feature << ',' << e.response << ',' << format_double(e.beta) << ','
       << format_double(e.odds_ratio) << ',' << format_double(e.std_error)
       << ',' << format_double(e.wald_z) << ',' << format_double(e.p_value)
       << ',' << e.stars << ',' << e.n_obs << ',' << flags << '\n';
  }
  return os.str();
}

std::string effects_to_html(const std::vector<EffectEstimate>& estimates) {
  std::ostringstream os;
  os << "<table class=\"effects\">\n"
     << "<tr><th>Feature</th><th>Response</th><th>OR</th><th>beta</th>"
     << "<th>SE</th><th>z</th><th>p</th><th></th></tr>\n";
  for (const auto& e : estimates) {
    if (e.skipped) {
      os << "<tr><td>" << e.feature << "</td><td>" << e.response
         << "</td><td colspan=\"6\">skipped: " << e.note << "</td></tr>\n";
      continue;
    }
    os << "<tr><td>" << e.feature << "</td><td>" << e.response << "</td><td"
       << (e.odds_ratio > 1.0 ? " class=\"pos\"" : " class=\"neg\"") << ">"
       << format_double(e.odds_ratio) << "</td><td>" << format_double(e.beta)
       << "</td><td>" << format_double(e.std_error) << "</td><td>"
       << format_double(e.wald_z) << "</td><td>" << format_double(e.p_value)
       << "</td><td>" << e.stars << "</td></tr>\n";
  }
  os << "</table>\n";
  return os.str();
}

}  // namespace argmine
