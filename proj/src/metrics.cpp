#include "hermit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hermit {

namespace {

void check_simplex_rows(const Eigen::MatrixXd& P, const char* name) {
  for (int i = 0; i < P.rows(); ++i) {
    if ((P.row(i).array() < -1e-9).any() || std::abs(P.row(i).sum() - 1.0) > 1e-6)
      throw std::invalid_argument(std::string(name) + ": rows must lie on the simplex");
  }
}

// soft mutual information with column-mean marginals
double soft_mi(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q) {
  const int n = static_cast<int>(P.rows());
  const Eigen::VectorXd p = P.colwise().mean();
  const Eigen::VectorXd q = Q.colwise().mean();
  const Eigen::MatrixXd joint = (P.transpose() * Q) / n;
  double mi = 0.0;
  for (int a = 0; a < joint.rows(); ++a)
    for (int b = 0; b < joint.cols(); ++b) {
      const double jab = joint(a, b);
      if (jab <= 0.0) continue;
      mi += jab * std::log(jab / (p(a) * q(b)));
    }
  return mi;
}

}  // namespace

double nmi(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q) {
  if (P.rows() != Q.rows()) throw std::invalid_argument("nmi: row counts differ");
  check_simplex_rows(P, "nmi P");
  check_simplex_rows(Q, "nmi Q");
  const double ipq = soft_mi(P, Q);
  const double ipp = soft_mi(P, P);
  const double iqq = soft_mi(Q, Q);
  if (ipp <= 0.0 || iqq <= 0.0) return 0.0;
  return ipq / std::sqrt(ipp * iqq);
}

Eigen::MatrixXd one_hot(const std::vector<int>& labels, int k) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(labels.size(), k);
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= k)
      throw std::invalid_argument("one_hot: label out of range");
    P(static_cast<int>(i), labels[i]) = 1.0;
  }
  return P;
}

std::optional<double> rank_auc(const Eigen::VectorXd& scores,
                               const std::vector<int>& labels) {
  const int n = static_cast<int>(scores.size());
  if (static_cast<int>(labels.size()) != n)
    throw std::invalid_argument("rank_auc: length mismatch");
  long n_pos = 0;
  for (int lbl : labels) {
    if (lbl != 0 && lbl != 1) throw std::invalid_argument("rank_auc: labels must be 0/1");
    n_pos += lbl;
  }
  const long n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return scores(a) < scores(b); });

  // average ranks over tie runs
  std::vector<double> rank(n);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && scores(order[j + 1]) == scores(order[i])) ++j;
    const double avg = 0.5 * (i + j) + 1.0;
    for (int t = i; t <= j; ++t) rank[order[t]] = avg;
    i = j + 1;
  }
  double rank_sum_pos = 0.0;
  for (int t = 0; t < n; ++t)
    if (labels[t] == 1) rank_sum_pos += rank[t];
  const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * (n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

std::vector<std::optional<double>> nmse_per_task(const Eigen::MatrixXd& pred,
                                                 const Eigen::MatrixXd& truth,
                                                 const BoolMask& mask,
                                                 const std::vector<Family>& tasks) {
  const int m = static_cast<int>(tasks.size());
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols() ||
      mask.rows() != pred.rows() || mask.cols() != pred.cols() || pred.cols() != m)
    throw std::invalid_argument("nmse: shape mismatch");

  std::vector<std::optional<double>> out(m);
  for (int j = 0; j < m; ++j) {
    const bool log_scale = tasks[j].kind == FamilyKind::Poisson;
    std::vector<double> t, p;
    for (int i = 0; i < pred.rows(); ++i) {
      if (!mask(i, j)) continue;
      double tv = truth(i, j), pv = pred(i, j);
      if (log_scale) {
        tv = std::log1p(tv);
        pv = std::log1p(pv);
      }
      t.push_back(tv);
      p.push_back(pv);
    }
    const int cnt = static_cast<int>(t.size());
    if (cnt < 2) continue;
    double mean_t = 0.0;
    for (double v : t) mean_t += v;
    mean_t /= cnt;
    double var = 0.0, mse = 0.0;
    for (int ii = 0; ii < cnt; ++ii) {
      var += (t[ii] - mean_t) * (t[ii] - mean_t);
      mse += (p[ii] - t[ii]) * (p[ii] - t[ii]);
    }
    var /= cnt;
    mse /= cnt;
    if (var <= 0.0) continue;
    out[j] = mse / var;
  }
  return out;
}

std::optional<double> nmse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth,
                           const BoolMask& mask, const std::vector<Family>& tasks) {
  const auto per_task = nmse_per_task(pred, truth, mask, tasks);
  double total = 0.0;
  int cnt = 0;
  for (const auto& v : per_task)
    if (v) {
      total += *v;
      ++cnt;
    }
  if (cnt == 0) return std::nullopt;
  return total / cnt;
}

std::vector<int> match_components(const std::vector<Eigen::MatrixXd>& beta_hat,
                                  const std::vector<Eigen::MatrixXd>& beta_true) {
  const int k = static_cast<int>(beta_true.size());
  if (static_cast<int>(beta_hat.size()) != k)
    throw std::invalid_argument("match_components: component counts differ");
  if (k > 8) throw std::invalid_argument("match_components: k > 8 unsupported");

  Eigen::MatrixXd cost(k, k);
  for (int r = 0; r < k; ++r)
    for (int s = 0; s < k; ++s) cost(r, s) = (beta_hat[s] - beta_true[r]).norm();

  std::vector<int> perm(k), best(k);
  std::iota(perm.begin(), perm.end(), 0);
  best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (int r = 0; r < k; ++r) c += cost(r, perm[r]);
    if (c < best_cost - 1e-15) {
      best_cost = c;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::optional<double> feature_selection_auc(
    const std::vector<Eigen::MatrixXd>& beta_hat,
    const std::vector<Eigen::MatrixXd>& beta_true, bool skip_intercept_row) {
  const auto perm = match_components(beta_hat, beta_true);
  const int k = static_cast<int>(beta_true.size());
  const int d = static_cast<int>(beta_true[0].rows());
  const int m = static_cast<int>(beta_true[0].cols());
  const int i0 = skip_intercept_row ? 1 : 0;

  std::vector<double> scores;
  std::vector<int> labels;
  scores.reserve(static_cast<size_t>(k) * (d - i0) * m);
  for (int r = 0; r < k; ++r)
    for (int j = 0; j < m; ++j)
      for (int i = i0; i < d; ++i) {
        scores.push_back(std::abs(beta_hat[perm[r]](i, j)));
        labels.push_back(beta_true[r](i, j) != 0.0 ? 1 : 0);
      }
  Eigen::VectorXd s = Eigen::Map<Eigen::VectorXd>(scores.data(), scores.size());
  return rank_auc(s, labels);
}

}  // namespace hermit
