#include "argmine/logistic.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "argmine/errors.hpp"

namespace argmine {

namespace {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::string column_label(const DenseDesign& design, Eigen::Index c) {
  if (static_cast<std::size_t>(c) < design.col_names.size())
    return design.col_names[static_cast<std::size_t>(c)];
  return "column " + std::to_string(c);
}

// Penalized log-likelihood (the objective being maximized).
double penalized_loglik(const Eigen::VectorXd& eta, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& beta, double ridge) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    // log sigma(eta) if y=1, log(1 - sigma(eta)) if y=0, stable form
    const double e = eta[i];
    const double log1pexp = e > 30.0 ? e : std::log1p(std::exp(e));
    ll += y[i] * e - log1pexp;
  }
  return ll - 0.5 * ridge * beta.squaredNorm();
}

struct Attempt {
  bool converged = false;
  Eigen::VectorXd beta;
  Eigen::MatrixXd hessian;
  int iterations = 0;
  double gradient_norm = 0.0;
};

Attempt newton_attempt(const Eigen::Map<const RowMajorMatrix>& x,
                       const Eigen::VectorXd& y, double ridge, int max_iter,
                       double tol) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  Attempt a;
  a.beta = Eigen::VectorXd::Zero(p);

  Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
  for (int iter = 0; iter < max_iter; ++iter) {
    Eigen::VectorXd prob(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      prob[i] = sigmoid(eta[i]);
      w[i] = prob[i] * (1.0 - prob[i]);
    }
    Eigen::VectorXd grad = x.transpose() * (y - prob) - ridge * a.beta;
    a.gradient_norm = grad.norm();
    a.iterations = iter;
    Eigen::MatrixXd hess = x.transpose() * w.asDiagonal() * x;
    hess.diagonal().array() += ridge;
    if (a.gradient_norm < tol) {
      a.converged = true;
      a.hessian = std::move(hess);
      return a;
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    if (ldlt.info() != Eigen::Success) return a;
    Eigen::VectorXd step = ldlt.solve(grad);
    if (!step.allFinite()) return a;

    Eigen::VectorXd beta_next, eta_next;
    if (a.gradient_norm < 1e-5) {
      // Quadratic convergence region: the full Newton step is reliable and
      // the line search would only compare float noise.
      beta_next = a.beta + step;
      eta_next = x * beta_next;
    } else {
      // Backtracking keeps the penalized log-likelihood non-decreasing.
      const double f0 = penalized_loglik(eta, y, a.beta, ridge);
      const double slope = grad.dot(step);
      double t = 1.0;
      for (;;) {
        beta_next = a.beta + t * step;
        eta_next = x * beta_next;
        const double f1 = penalized_loglik(eta_next, y, beta_next, ridge);
        if (f1 >= f0 + 1e-4 * t * slope || t < 1e-10) break;
        t *= 0.5;
      }
    }
    a.beta = std::move(beta_next);
    eta = std::move(eta_next);

    // Runaway coefficients signal (quasi-)separation for the plain MLE.
    if (ridge == 0.0 && a.beta.lpNorm<Eigen::Infinity>() > 30.0) return a;
    if (!a.beta.allFinite()) return a;
  }
  return a;
}

}  // namespace

double LogisticFit::std_error(std::size_t i, std::size_t p) const {
  return std::sqrt(covariance[i * p + i]);
}

LogisticFit fit_logistic_mle(const DenseDesign& design,
                             const std::vector<std::uint8_t>& response,
                             int max_iter, double tol) {
  if (design.rows == 0 || design.cols == 0)
    throw ConfigError("fit_logistic_mle: empty design");
  if (design.rows != response.size())
    throw ConfigError("fit_logistic_mle: response size mismatch");
  for (double v : design.values) {
    if (!std::isfinite(v))
      throw NumericError("fit_logistic_mle: non-finite design entry");
  }

  Eigen::Map<const RowMajorMatrix> x(design.values.data(),
                                     static_cast<Eigen::Index>(design.rows),
                                     static_cast<Eigen::Index>(design.cols));
  Eigen::VectorXd y(static_cast<Eigen::Index>(design.rows));
  for (std::size_t i = 0; i < response.size(); ++i) {
    if (response[i] > 1)
      throw ConfigError("fit_logistic_mle: response must be 0/1");
    y[static_cast<Eigen::Index>(i)] = response[i];
  }

  // Exact collinearity makes the covariance meaningless no matter the jitter.
  Eigen::MatrixXd gram = x.transpose() * x;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  lu.setThreshold(1e-10);
  if (lu.rank() < gram.rows()) {
    const auto perm = lu.permutationQ().indices();
    std::ostringstream os;
    os << "fit_logistic_mle: singular Hessian, collinear columns:";
    for (Eigen::Index i = lu.rank(); i < gram.rows(); ++i) {
      os << " " << column_label(design, perm[i]);
    }
    throw NumericError(os.str());
  }

  Attempt a = newton_attempt(x, y, 0.0, max_iter, tol);
  bool ridged = false;
  if (!a.converged) {
    a = newton_attempt(x, y, 1e-6, std::max(max_iter, 200), tol);
    ridged = true;
  }
  if (!a.converged) {
    throw NumericError("fit_logistic_mle: did not converge (gradient norm " +
                       std::to_string(a.gradient_norm) + ")");
  }

  Eigen::LDLT<Eigen::MatrixXd> ldlt(a.hessian);
  if (ldlt.info() != Eigen::Success) {
    throw NumericError("fit_logistic_mle: singular Hessian at the optimum");
  }
  Eigen::MatrixXd cov = ldlt.solve(
      Eigen::MatrixXd::Identity(a.hessian.rows(), a.hessian.cols()));

  LogisticFit fit;
  fit.beta.assign(a.beta.data(), a.beta.data() + a.beta.size());
  fit.covariance.resize(static_cast<std::size_t>(cov.rows()) *
                        static_cast<std::size_t>(cov.cols()));
  for (Eigen::Index r = 0; r < cov.rows(); ++r) {
    for (Eigen::Index c = 0; c < cov.cols(); ++c) {
      fit.covariance[static_cast<std::size_t>(r) *
                         static_cast<std::size_t>(cov.cols()) +
                     static_cast<std::size_t>(c)] = cov(r, c);
    }
  }
  fit.iterations = a.iterations;
  fit.ridged = ridged;
  fit.gradient_norm = a.gradient_norm;
  return fit;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

std::pair<double, double> wald_test(double beta, double std_error) {
  if (!(std_error > 0.0))
    throw NumericError("wald_test: standard error must be positive");
  const double z = beta / std_error;
  const double p = std::erfc(std::abs(z) / std::sqrt(2.0));
  return {z, p};
}

}  // namespace argmine
