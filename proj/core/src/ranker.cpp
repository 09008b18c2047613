#include "argmine/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "argmine/errors.hpp"
#include "argmine/logistic.hpp"
#include "argmine/metrics.hpp"

namespace argmine {

using nlohmann::json;

const char* to_string(Norm n) { return n == Norm::l1 ? "l1" : "l2"; }

void SparseMatrix::add_row(const std::vector<std::pair<int, double>>& entries) {
  if (row_begin.empty()) row_begin.push_back(0);
  for (const auto& [c, v] : entries) {
    col.push_back(c);
    val.push_back(v);
  }
  row_begin.push_back(col.size());
  ++rows;
}

StandardizationStats compute_standardization(const RankerDesign& design) {
  StandardizationStats stats;
  const double n = static_cast<double>(design.x.rows);
  if (n == 0) return stats;
  std::map<int, std::pair<double, double>> sums;  // col -> (sum, sumsq)
  for (int c : design.continuous_columns) sums[c] = {0.0, 0.0};
  for (std::size_t i = 0; i < design.x.col.size(); ++i) {
    auto it = sums.find(design.x.col[i]);
    if (it == sums.end()) continue;
    it->second.first += design.x.val[i];
    it->second.second += design.x.val[i] * design.x.val[i];
  }
  for (const auto& [c, s] : sums) {
    const double mean = s.first / n;
    const double var = std::max(0.0, s.second / n - mean * mean);
    stats.mean_sd[c] = {mean, std::sqrt(var)};
  }
  return stats;
}

void apply_standardization(SparseMatrix& x, const StandardizationStats& stats) {
  if (stats.mean_sd.empty()) return;
  for (std::size_t i = 0; i < x.col.size(); ++i) {
    auto it = stats.mean_sd.find(x.col[i]);
    if (it == stats.mean_sd.end()) continue;
    const auto [mean, sd] = it->second;
    x.val[i] = sd > 0.0 ? (x.val[i] - mean) / sd : 0.0;
  }
}

namespace {

// eta = X w + b
void linear_scores(const SparseMatrix& x, const std::vector<double>& w,
                   double b, std::vector<double>& eta) {
  eta.assign(x.rows, b);
  for (std::size_t r = 0; r < x.rows; ++r) {
    double acc = 0.0;
    for (std::size_t i = x.row_begin[r]; i < x.row_begin[r + 1]; ++i) {
      acc += w[static_cast<std::size_t>(x.col[i])] * x.val[i];
    }
    eta[r] += acc;
  }
}

// Mean negative log-likelihood: the regularization grid stays comparable
// across corpus sizes (and matches the sparsity the weights are expected to
// reach at lambda = 1e-1).
double nll(const std::vector<double>& eta,
           const std::vector<std::uint8_t>& y) {
  double total = 0.0;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    const double e = eta[i];
    const double log1pexp = e > 30.0 ? e : std::log1p(std::exp(e));
    total += log1pexp - (y[i] ? e : 0.0);
  }
  return total / static_cast<double>(eta.size());
}

// grad_w = X^T (p - y) / n, grad_b = mean(p - y)
void nll_gradient(const SparseMatrix& x, const std::vector<double>& eta,
                  const std::vector<std::uint8_t>& y, std::vector<double>& gw,
                  double& gb, std::vector<double>& resid) {
  const double inv_n = 1.0 / static_cast<double>(x.rows);
  resid.resize(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i)
    resid[i] = (sigmoid(eta[i]) - (y[i] ? 1.0 : 0.0)) * inv_n;
  gw.assign(x.cols, 0.0);
  gb = 0.0;
  for (std::size_t r = 0; r < x.rows; ++r) {
    for (std::size_t i = x.row_begin[r]; i < x.row_begin[r + 1]; ++i) {
      gw[static_cast<std::size_t>(x.col[i])] += resid[r] * x.val[i];
    }
    gb += resid[r];
  }
}

// Hessian-vector product for Newton-CG: H [vw; vb] with H of the penalized
// objective (lambda on weights, not intercept).
void hessian_product(const SparseMatrix& x, const std::vector<double>& w_diag,
                     double lambda, const std::vector<double>& vw, double vb,
                     std::vector<double>& out_w, double& out_b,
                     std::vector<double>& scratch) {
  const double inv_n = 1.0 / static_cast<double>(x.rows);
  scratch.assign(x.rows, vb);
  for (std::size_t r = 0; r < x.rows; ++r) {
    double acc = 0.0;
    for (std::size_t i = x.row_begin[r]; i < x.row_begin[r + 1]; ++i) {
      acc += vw[static_cast<std::size_t>(x.col[i])] * x.val[i];
    }
    scratch[r] = (scratch[r] + acc) * w_diag[r] * inv_n;
  }
  out_w.assign(x.cols, 0.0);
  out_b = 0.0;
  for (std::size_t r = 0; r < x.rows; ++r) {
    for (std::size_t i = x.row_begin[r]; i < x.row_begin[r + 1]; ++i) {
      out_w[static_cast<std::size_t>(x.col[i])] += scratch[r] * x.val[i];
    }
    out_b += scratch[r];
  }
  for (std::size_t c = 0; c < x.cols; ++c) out_w[c] += lambda * vw[c];
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void train_l2(const SparseMatrix& x, const std::vector<std::uint8_t>& y,
              double lambda, int max_iter, double tol, RankerModel& model,
              std::vector<double>* trace) {
  const std::size_t p = x.cols;
  std::vector<double> w(p, 0.0);
  double b = 0.0;
  std::vector<double> eta, gw, resid, scratch;
  double gb = 0.0;
  if (max_iter <= 0) max_iter = 50;

  linear_scores(x, w, b, eta);
  double pen_obj = nll(eta, y);  // w = 0, penalty term is zero
  if (trace) trace->push_back(pen_obj);

  int iterations = 0;
  for (int iter = 0; iter < max_iter; ++iter) {
    iterations = iter + 1;
    nll_gradient(x, eta, y, gw, gb, resid);
    for (std::size_t c = 0; c < p; ++c) gw[c] += lambda * w[c];
    double gnorm = std::abs(gb);
    for (double g : gw) gnorm = std::max(gnorm, std::abs(g));
    if (gnorm < tol) break;

    std::vector<double> w_diag(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) {
      const double pr = sigmoid(eta[i]);
      w_diag[i] = pr * (1.0 - pr);
    }

    // Conjugate gradient on H d = -g.
    std::vector<double> dw(p, 0.0), rw = gw, pw = gw, hw;
    double db = 0.0, rb = gb, pb = gb, hb = 0.0;
    for (double& v : rw) v = -v;
    rb = -rb;
    for (std::size_t c = 0; c < p; ++c) pw[c] = rw[c];
    pb = rb;
    double rs = dot(rw, rw) + rb * rb;
    const double cg_tol = std::max(1e-20, 1e-6 * rs);
    for (int cg = 0; cg < 250 && rs > cg_tol; ++cg) {
      hessian_product(x, w_diag, lambda, pw, pb, hw, hb, scratch);
      const double ph = dot(pw, hw) + pb * hb;
      if (ph <= 0.0) break;
      const double alpha = rs / ph;
      for (std::size_t c = 0; c < p; ++c) {
        dw[c] += alpha * pw[c];
        rw[c] -= alpha * hw[c];
      }
      db += alpha * pb;
      rb -= alpha * hb;
      const double rs_next = dot(rw, rw) + rb * rb;
      const double beta = rs_next / rs;
      for (std::size_t c = 0; c < p; ++c) pw[c] = rw[c] + beta * pw[c];
      pb = rb + beta * pb;
      rs = rs_next;
    }

    // Backtracking line search; penalized objective must not increase.
    const double f0 = pen_obj;
    double slope = dot(gw, dw) + gb * db;
    if (slope >= 0.0) {
      // CG returned a non-descent direction; fall back to steepest descent.
      for (std::size_t c = 0; c < p; ++c) dw[c] = -gw[c];
      db = -gb;
      slope = dot(gw, dw) + gb * db;
    }
    double t = 1.0;
    std::vector<double> w_next(p);
    double b_next = 0.0;
    double f1 = f0;
    for (;;) {
      for (std::size_t c = 0; c < p; ++c) w_next[c] = w[c] + t * dw[c];
      b_next = b + t * db;
      linear_scores(x, w_next, b_next, eta);
      f1 = nll(eta, y) + 0.5 * lambda * dot(w_next, w_next);
      if (f1 <= f0 + 1e-4 * t * slope || t < 1e-12) break;
      t *= 0.5;
    }
    if (f1 > f0) {  // no progress possible
      linear_scores(x, w, b, eta);
      break;
    }
    w = std::move(w_next);
    b = b_next;
    pen_obj = f1;
    if (trace) trace->push_back(f1);
    if (f0 - f1 < 1e-12 * std::max(1.0, std::abs(f0))) break;
  }

  model.weights = std::move(w);
  model.intercept = b;
  model.iterations = iterations;
  linear_scores(x, model.weights, model.intercept, eta);
  model.final_objective =
      nll(eta, y) + 0.5 * lambda * dot(model.weights, model.weights);
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

void train_l1(const SparseMatrix& x, const std::vector<std::uint8_t>& y,
              double lambda, int max_iter, double tol, RankerModel& model,
              std::vector<double>* trace) {
  const std::size_t p = x.cols;
  std::vector<double> w(p, 0.0);
  double b = 0.0;
  std::vector<double> eta, gw, resid;
  double gb = 0.0;
  if (max_iter <= 0) max_iter = 1000;

  linear_scores(x, w, b, eta);
  double f = nll(eta, y);
  auto l1_norm = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (double u : v) s += std::abs(u);
    return s;
  };
  double objective = f + lambda * l1_norm(w);
  if (trace) trace->push_back(objective);

  double step = 1.0;
  int iterations = 0;
  std::vector<double> w_next(p), eta_next;
  for (int iter = 0; iter < max_iter; ++iter) {
    iterations = iter + 1;
    nll_gradient(x, eta, y, gw, gb, resid);

    // Backtracking proximal step: f(z) <= f(w) + g.(z-w) + |z-w|^2 / (2t).
    double b_next = 0.0;
    double f_next = 0.0;
    for (;;) {
      for (std::size_t c = 0; c < p; ++c) {
        w_next[c] = soft_threshold(w[c] - step * gw[c], step * lambda);
      }
      b_next = b - step * gb;
      linear_scores(x, w_next, b_next, eta_next);
      f_next = nll(eta_next, y);
      double quad = 0.0, lin = 0.0;
      for (std::size_t c = 0; c < p; ++c) {
        const double d = w_next[c] - w[c];
        lin += gw[c] * d;
        quad += d * d;
      }
      const double dbv = b_next - b;
      lin += gb * dbv;
      quad += dbv * dbv;
      if (f_next <= f + lin + quad / (2.0 * step) + 1e-12 || step < 1e-12)
        break;
      step *= 0.5;
    }

    const double objective_next = f_next + lambda * l1_norm(w_next);
    if (objective_next > objective + 1e-12) break;  // numerically stuck

    double max_change = std::abs(b_next - b);
    for (std::size_t c = 0; c < p; ++c)
      max_change = std::max(max_change, std::abs(w_next[c] - w[c]));

    w.swap(w_next);
    b = b_next;
    eta.swap(eta_next);
    f = f_next;
    objective = objective_next;
    if (trace) trace->push_back(objective);
    step = std::min(step * 1.25, 1e4);           // recover after backtracks
    if (max_change < std::max(tol, 1e-10)) break;
  }

  model.weights = std::move(w);
  model.intercept = b;
  model.iterations = iterations;
  model.final_objective = objective;
}

}  // namespace

double RankerModel::sparsity() const {
  if (weights.empty()) return 0.0;
  std::size_t zeros = 0;
  for (double w : weights) {
    if (w == 0.0) ++zeros;
  }
  return static_cast<double>(zeros) / static_cast<double>(weights.size());
}

RankerModel train_ranker(const RankerDesign& design,
                         const std::vector<std::uint8_t>& labels, Norm norm,
                         double reg_weight, std::uint64_t seed,
                         const TrainOptions& options) {
  if (design.x.rows != labels.size())
    throw ConfigError("train_ranker: label count mismatch");
  if (design.x.cols != design.column_names.size())
    throw ConfigError("train_ranker: column names mismatch");
  for (std::size_t i = 0; i < design.x.val.size(); ++i) {
    if (!std::isfinite(design.x.val[i])) {
      throw NumericError(
          "train_ranker: NaN in feature column '" +
          design.column_names[static_cast<std::size_t>(design.x.col[i])] + "'");
    }
  }

  RankerModel model;
  model.column_names = design.column_names;
  model.norm = norm;
  model.reg_weight = reg_weight;
  model.seed = seed;
  model.standardization = compute_standardization(design);

  SparseMatrix x = design.x;
  apply_standardization(x, model.standardization);

  if (norm == Norm::l2) {
    train_l2(x, labels, reg_weight, options.max_iterations, options.tolerance,
             model, options.objective_trace);
  } else {
    train_l1(x, labels, reg_weight, options.max_iterations, options.tolerance,
             model, options.objective_trace);
  }
  return model;
}

std::vector<double> score_sentences(const RankerModel& model,
                                    const RankerDesign& design) {
  if (design.x.cols != model.weights.size())
    throw ConfigError("score_sentences: design has " +
                      std::to_string(design.x.cols) + " columns, model has " +
                      std::to_string(model.weights.size()));
  SparseMatrix x = design.x;
  apply_standardization(x, model.standardization);
  std::vector<double> eta;
  linear_scores(x, model.weights, model.intercept, eta);
  // |eta| capped below the point where sigmoid rounds to exactly 0 or 1, so
  // scores stay inside the open interval.
  for (double& e : eta) e = sigmoid(std::clamp(e, -34.0, 34.0));
  return eta;
}

std::string GridResult::to_csv() const {
  std::ostringstream os;
  os << "norm,reg_weight,val_auc,chosen\n";
  os.precision(10);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    os << to_string(entries[i].norm) << ',' << entries[i].reg_weight << ','
       << entries[i].val_auc << ',' << (i == chosen ? 1 : 0) << '\n';
  }
  return os.str();
}

GridResult grid_search(const RankerDesign& train,
                       const std::vector<std::uint8_t>& y_train,
                       const RankerDesign& val,
                       const std::vector<std::uint8_t>& y_val,
                       const std::vector<double>& reg_grid,
                       std::uint64_t seed) {
  GridResult result;
  for (Norm norm : {Norm::l2, Norm::l1}) {
    for (double reg : reg_grid) {
      RankerModel model = train_ranker(train, y_train, norm, reg, seed);
      const auto scores = score_sentences(model, val);
      GridEntry entry;
      entry.norm = norm;
      entry.reg_weight = reg;
      entry.val_auc = auc(scores, y_val);
      result.entries.push_back(entry);
    }
  }
  // argmax by AUC; ties prefer the smaller reg weight, then L2 over L1.
  result.chosen = 0;
  for (std::size_t i = 1; i < result.entries.size(); ++i) {
    const auto& a = result.entries[i];
    const auto& best = result.entries[result.chosen];
    const bool better =
        a.val_auc > best.val_auc ||
        (a.val_auc == best.val_auc &&
         (a.reg_weight < best.reg_weight ||
          (a.reg_weight == best.reg_weight && a.norm == Norm::l2 &&
           best.norm == Norm::l1)));
    if (better) result.chosen = i;
  }
  return result;
}

std::vector<double> baseline_length(const std::vector<std::string>& sentences) {
  std::vector<double> scores;
  scores.reserve(sentences.size());
  for (const auto& s : sentences)
    scores.push_back(static_cast<double>(s.size()));
  return scores;
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::vector<double> baseline_random(const std::string& post_id,
                                    std::size_t n_sentences,
                                    std::uint64_t seed) {
  std::vector<double> scores(n_sentences);
  const std::uint64_t base = fnv1a(post_id) ^ splitmix64(seed + 1);
  for (std::size_t i = 0; i < n_sentences; ++i) {
    const std::uint64_t bits = splitmix64(base + i);
    scores[i] = static_cast<double>(bits >> 11) * 0x1.0p-53;
  }
  return scores;
}

std::string RankerModel::serialize() const {
  json j;
  j["format_version"] = 1;
  j["norm"] = to_string(norm);
  j["reg_weight"] = reg_weight;
  j["seed"] = seed;
  j["intercept"] = intercept;
  j["trained_on"] = trained_on;
  j["topic_count"] = topic_count;
  j["iterations"] = iterations;
  j["final_objective"] = final_objective;
  json weights_by_name;
  for (std::size_t i = 0; i < column_names.size(); ++i) {
    weights_by_name[column_names[i]] = weights[i];
  }
  j["weights"] = std::move(weights_by_name);
  j["columns"] = column_names;
  json standardized = json::object();
  for (const auto& [c, ms] : standardization.mean_sd) {
    standardized[column_names[static_cast<std::size_t>(c)]] =
        json::array({ms.first, ms.second});
  }
  j["standardization"] = std::move(standardized);
  return j.dump() + "\n";
}

RankerModel RankerModel::deserialize(const std::string& json_text) {
  json j = json::parse(json_text);
  if (j.at("format_version").get<int>() != 1)
    throw DataError("ranker model: unsupported format_version");
  RankerModel m;
  m.norm = j.at("norm").get<std::string>() == "l1" ? Norm::l1 : Norm::l2;
  m.reg_weight = j.at("reg_weight").get<double>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.intercept = j.at("intercept").get<double>();
  m.trained_on = j.value("trained_on", std::string());
  m.topic_count = j.value("topic_count", 0);
  m.iterations = j.value("iterations", 0);
  m.final_objective = j.value("final_objective", 0.0);
  m.column_names = j.at("columns").get<std::vector<std::string>>();
  const auto& weights_by_name = j.at("weights");
  std::unordered_map<std::string, int> col_of;
  m.weights.resize(m.column_names.size(), 0.0);
  for (std::size_t i = 0; i < m.column_names.size(); ++i) {
    col_of[m.column_names[i]] = static_cast<int>(i);
    m.weights[i] = weights_by_name.at(m.column_names[i]).get<double>();
  }
  for (const auto& [name, ms] : j.at("standardization").items()) {
    auto it = col_of.find(name);
    if (it == col_of.end())
      throw DataError("ranker model: unknown standardized column " + name);
    m.standardization.mean_sd[it->second] = {ms.at(0).get<double>(),
                                             ms.at(1).get<double>()};
  }
  return m;
}

void RankerModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file: " + path);
  out << serialize();
}

RankerModel RankerModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read model file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

}  // namespace argmine
