#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace argmine {

// Dense design matrix, row-major. Column 0 is normally the intercept.
struct DenseDesign {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;          // rows x cols
  std::vector<std::string> col_names;  // optional, used in error messages

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
};

struct LogisticFit {
  std::vector<double> beta;
  std::vector<double> covariance;  // cols x cols, row-major: inverse Hessian
  int iterations = 0;
  bool ridged = false;    // separation rescue with ridge jitter applied
  double gradient_norm = 0.0;

  double covariance_at(std::size_t i, std::size_t j, std::size_t p) const {
    return covariance[i * p + j];
  }
  double std_error(std::size_t i, std::size_t p) const;
};

// Newton-Raphson maximum likelihood for binary logistic regression. Converges
// to gradient norm < tol; on non-convergence or separation the fit retries
// with a ridge jitter (lambda = 1e-6) and sets `ridged`. A Hessian that stays
// singular after the jitter raises NumericError naming the collinear columns.
LogisticFit fit_logistic_mle(const DenseDesign& design,
                             const std::vector<std::uint8_t>& response,
                             int max_iter = 100, double tol = 1e-10);

// Standard normal CDF via erfc; |error| < 1e-12 over the double range.
double normal_cdf(double z);

// Wald z = beta / se and the two-sided p-value 2 * (1 - Phi(|z|)).
// Raises NumericError when se <= 0.
std::pair<double, double> wald_test(double beta, double std_error);

inline double sigmoid(double x) {
  if (x >= 0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace argmine
