#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "argmine/effects.hpp"
#include "argmine/errors.hpp"
#include "argmine/logistic.hpp"
#include "testutil.hpp"

using namespace argmine;

namespace {

// Single binary predictor with intercept from 2x2 cell counts.
DenseDesign design_2x2(int a, int b, int c, int d,
                       std::vector<std::uint8_t>& y) {
  // a: X=1,Y=1; b: X=1,Y=0; c: X=0,Y=1; d: X=0,Y=0
  DenseDesign design;
  design.cols = 2;
  design.col_names = {"(intercept)", "x"};
  auto push = [&](double x, std::uint8_t label, int count) {
    for (int i = 0; i < count; ++i) {
      design.values.push_back(1.0);
      design.values.push_back(x);
      y.push_back(label);
    }
  };
  push(1.0, 1, a);
  push(1.0, 0, b);
  push(0.0, 1, c);
  push(0.0, 0, d);
  design.rows = y.size();
  return design;
}

}  // namespace

TEST_CASE("2x2 table recovers the closed-form odds ratio") {
  std::vector<std::uint8_t> y;
  const auto design = design_2x2(30, 70, 10, 90, y);
  const auto fit = fit_logistic_mle(design, y);
  // closed form: (30 * 90) / (70 * 10) = 27/7
  const double expected = std::log(27.0 / 7.0);
  CHECK(std::abs(fit.beta[1] - expected) < 1e-6);
  CHECK(std::abs(std::exp(fit.beta[1]) - 27.0 / 7.0) < 1e-6);
  CHECK(!fit.ridged);
  CHECK(fit.gradient_norm < 1e-10);
}

TEST_CASE("independent response gives OR = 1") {
  std::vector<std::uint8_t> y;
  const auto design = design_2x2(30, 70, 30, 70, y);
  const auto fit = fit_logistic_mle(design, y);
  CHECK(std::abs(std::exp(fit.beta[1]) - 1.0) < 1e-6);
}

TEST_CASE("synthetic generator with true beta recovered within 0.1") {
  std::mt19937 rng(4242);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DenseDesign design;
  design.cols = 2;
  design.col_names = {"(intercept)", "x"};
  std::vector<std::uint8_t> y;
  for (int i = 0; i < 5000; ++i) {
    const double x = normal(rng);
    design.values.push_back(1.0);
    design.values.push_back(x);
    y.push_back(unit(rng) < sigmoid(0.7 * x) ? 1 : 0);
  }
  design.rows = y.size();
  const auto fit = fit_logistic_mle(design, y);
  CHECK(std::abs(fit.beta[1] - 0.7) <= 0.1);
}

TEST_CASE("covariance is symmetric and positive semi-definite") {
  std::mt19937 rng(7);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DenseDesign design;
  design.cols = 3;
  std::vector<std::uint8_t> y;
  for (int i = 0; i < 400; ++i) {
    const double x1 = normal(rng), x2 = normal(rng);
    design.values.insert(design.values.end(), {1.0, x1, x2});
    y.push_back(unit(rng) < sigmoid(0.5 * x1 - 0.3 * x2) ? 1 : 0);
  }
  design.rows = y.size();
  const auto fit = fit_logistic_mle(design, y);
  const std::size_t p = design.cols;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      CHECK(std::abs(fit.covariance_at(i, j, p) - fit.covariance_at(j, i, p)) <
            1e-8);
    }
  }
  // random quadratic forms stay nonnegative
  for (int round = 0; round < 50; ++round) {
    std::vector<double> v(p);
    for (auto& x : v) x = normal(rng);
    double q = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) {
        q += v[i] * fit.covariance_at(i, j, p) * v[j];
      }
    }
    CHECK(q >= -1e-8);
  }
}

TEST_CASE("sign of beta matches sign of the sample log-odds-ratio") {
  std::mt19937 rng(55);
  for (int round = 0; round < 30; ++round) {
    const int a = 5 + static_cast<int>(rng() % 40);
    const int b = 5 + static_cast<int>(rng() % 40);
    const int c = 5 + static_cast<int>(rng() % 40);
    const int d = 5 + static_cast<int>(rng() % 40);
    std::vector<std::uint8_t> y;
    const auto design = design_2x2(a, b, c, d, y);
    const auto fit = fit_logistic_mle(design, y);
    const double sample_log_or = std::log(
        (static_cast<double>(a) * d) / (static_cast<double>(b) * c));
    if (std::abs(sample_log_or) > 1e-9) {
      CHECK(std::signbit(fit.beta[1]) == std::signbit(sample_log_or));
    }
  }
}

TEST_CASE("collinear columns are named") {
  DenseDesign design;
  design.cols = 3;
  design.col_names = {"(intercept)", "x", "x_copy"};
  std::vector<std::uint8_t> y;
  std::mt19937 rng(1);
  for (int i = 0; i < 50; ++i) {
    const double x = static_cast<double>(rng() % 3);
    design.values.insert(design.values.end(), {1.0, x, x});
    y.push_back(rng() % 2);
  }
  design.rows = y.size();
  try {
    fit_logistic_mle(design, y);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("collinear") != std::string::npos);
  }
}

TEST_CASE("wald test") {
  SUBCASE("z = 0 -> p = 1") {
    const auto [z, p] = wald_test(0.0, 1.0);
    CHECK(z == 0.0);
    CHECK(p == doctest::Approx(1.0));
  }
  SUBCASE("z = 1.959964 -> p = 0.05") {
    const auto [z, p] = wald_test(1.959964, 1.0);
    CHECK(std::abs(p - 0.05) < 1e-5);
  }
  SUBCASE("symmetry") {
    for (double v : {0.3, 1.1, 2.7}) {
      CHECK(wald_test(v, 1.0).second ==
            doctest::Approx(wald_test(-v, 1.0).second));
    }
  }
  SUBCASE("nonpositive SE is an error") {
    CHECK_THROWS_AS(wald_test(1.0, 0.0), NumericError);
    CHECK_THROWS_AS(wald_test(1.0, -2.0), NumericError);
  }
}

TEST_CASE("normal cdf matches the quadrature oracle to 1e-8") {
  for (double z = -6.0; z <= 6.0; z += 0.25) {
    CHECK(std::abs(normal_cdf(z) - testutil::normal_cdf_quadrature(z)) < 1e-8);
    const double p = wald_test(z == 0.0 ? 1e-300 : z, 1.0).second;
    CHECK(std::abs(p - testutil::two_sided_p_quadrature(z)) < 1e-8);
  }
}

TEST_CASE("quasi-separation is rescued with the ridge jitter") {
  // binary feature present iff label positive
  std::vector<double> x;
  std::vector<std::uint8_t> y;
  std::vector<int> domains;
  for (int i = 0; i < 100; ++i) {
    const bool positive = i % 2 == 0;
    x.push_back(positive ? 1.0 : 0.0);
    y.push_back(positive ? 1 : 0);
    domains.push_back(i % 4 < 2 ? 0 : 1);
  }
  const auto est = feature_effect(x, y, domains, false, "sep", "attacked");
  CHECK(est.ridged);
  CHECK(est.odds_ratio > 100.0);
}

TEST_CASE("domain-confounded null feature shows no effect") {
  std::mt19937 rng(1001);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x;
  std::vector<std::uint8_t> y;
  std::vector<int> domains;
  for (int i = 0; i < 4000; ++i) {
    const int d = static_cast<int>(rng() % 4);
    // feature frequency varies by domain; label depends on domain only
    const double feature_rate = 0.15 + 0.2 * d;
    const double label_rate = 0.1 + 0.18 * d;
    x.push_back(unit(rng) < feature_rate ? 1.0 : 0.0);
    y.push_back(unit(rng) < label_rate ? 1 : 0);
    domains.push_back(d);
  }
  const auto est = feature_effect(x, y, domains, false, "null", "attacked");
  CHECK(est.odds_ratio > 0.8);
  CHECK(est.odds_ratio < 1.25);
  CHECK(est.p_value > 0.05);
}

TEST_CASE("standardized features are scale invariant") {
  std::mt19937 rng(21);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x, x10;
  std::vector<std::uint8_t> y;
  std::vector<int> domains;
  for (int i = 0; i < 600; ++i) {
    const double v = normal(rng);
    x.push_back(v);
    x10.push_back(10.0 * v);
    y.push_back(unit(rng) < sigmoid(0.8 * v) ? 1 : 0);
    domains.push_back(static_cast<int>(rng() % 3));
  }
  const auto a = feature_effect(x, y, domains, true, "f", "attacked");
  const auto b = feature_effect(x10, y, domains, true, "f", "attacked");
  CHECK(a.beta == doctest::Approx(b.beta).epsilon(1e-9));
  CHECK(a.std_error == doctest::Approx(b.std_error).epsilon(1e-9));
  CHECK(a.p_value == doctest::Approx(b.p_value).epsilon(1e-9));
}

TEST_CASE("feature constant within every domain is an error") {
  // the feature equals a domain indicator
  std::vector<double> x;
  std::vector<std::uint8_t> y;
  std::vector<int> domains;
  std::mt19937 rng(3);
  for (int i = 0; i < 100; ++i) {
    const int d = i % 2;
    x.push_back(d);
    y.push_back(rng() % 2);
    domains.push_back(d);
  }
  try {
    feature_effect(x, y, domains, false, "domain_copy", "attacked");
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("no within-domain variation") !=
          std::string::npos);
  }
}

TEST_CASE("effects_report emits both responses with identical numbers") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::uint8_t> attacked, successful;
  std::vector<int> domains;
  EffectColumn strong;
  strong.name = "strong";
  EffectColumn noise;
  noise.name = "noise";
  for (int i = 0; i < 2000; ++i) {
    const double x = unit(rng) < 0.4 ? 1.0 : 0.0;
    strong.values.push_back(x);
    noise.values.push_back(unit(rng) < 0.5 ? 1.0 : 0.0);
    const bool att = unit(rng) < (x > 0.5 ? 0.7 : 0.15);
    attacked.push_back(att ? 1 : 0);
    successful.push_back(att && unit(rng) < (x > 0.5 ? 0.6 : 0.2) ? 1 : 0);
    domains.push_back(static_cast<int>(rng() % 2));
  }
  const auto estimates =
      effects_report({strong, noise}, attacked, successful, domains);
  REQUIRE(estimates.size() == 4);
  CHECK(estimates[0].feature == "strong");
  CHECK(estimates[0].response == "attacked");
  CHECK(estimates[0].odds_ratio > 1.0);
  CHECK(estimates[0].stars == "***");
  CHECK(estimates[1].response == "successful");
  CHECK(estimates[1].odds_ratio > 1.0);

  const std::string csv = effects_to_csv(estimates);
  const std::string html = effects_to_html(estimates);
  CHECK(csv.find("***") != std::string::npos);
  CHECK(html.find("***") != std::string::npos);
  // identical formatted numbers appear in both emissions
  for (const auto& est : estimates) {
    std::ostringstream oss;
    oss.precision(6);
    oss << est.odds_ratio;
    CHECK(csv.find(oss.str()) != std::string::npos);
    CHECK(html.find(oss.str()) != std::string::npos);
  }
}

TEST_CASE("effects_report with no features emits a header-only table") {
  const auto estimates = effects_report({}, {1, 0}, {0, 0}, {0, 0});
  CHECK(estimates.empty());
  CHECK(effects_to_csv(estimates) ==
        "feature,response,beta,or,se,z,p,stars,n_obs,flags\n");
}
