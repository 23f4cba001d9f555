#include "hermit/taskdiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

#include "hermit/metrics.hpp"
#include "hermit/parallel.hpp"
#include "hermit/rng.hpp"

namespace hermit {

namespace {

constexpr double kProbClamp = 1e-12;

double clamped(double p) { return std::clamp(p, kProbClamp, 1.0); }

// KL between the rows of two responsibility matrices, summed over `rows`.
double kl_over_rows(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q,
                    const std::vector<int>& rows) {
  double total = 0.0;
  for (int i : rows) {
    for (int r = 0; r < P.cols(); ++r) {
      const double p = clamped(P(i, r));
      const double q = clamped(Q(i, r));
      total += p * std::log(p / q);
    }
  }
  return total;
}

}  // namespace

std::vector<std::optional<double>> concordant_scores(const MixtureModel& model,
                                                     const Dataset& data) {
  const Eigen::MatrixXd p_full = responsibilities(model, data).rho;
  std::vector<std::optional<double>> scores(data.m());
  for (int h = 0; h < data.m(); ++h) {
    const auto& rows = data.task_rows()[h];
    if (rows.empty()) continue;
    const Eigen::MatrixXd p_h = responsibilities(model, data, {h}).rho;
    const double d1 = kl_over_rows(p_full, p_h, rows);
    const double d2 = kl_over_rows(p_h, p_full, rows);
    scores[h] = -(d1 + d2) / (2.0 * static_cast<double>(rows.size()));
  }
  return scores;
}

std::optional<double> two_means_split(const std::vector<double>& scores) {
  const int n = static_cast<int>(scores.size());
  if (n < 2) return std::nullopt;
  std::vector<double> s = scores;
  std::sort(s.begin(), s.end());
  if (s.front() == s.back()) return std::nullopt;

  std::vector<double> prefix(n + 1, 0.0), prefix_sq(n + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    prefix[i + 1] = prefix[i] + s[i];
    prefix_sq[i + 1] = prefix_sq[i] + s[i] * s[i];
  }
  auto wcss = [&](int lo, int hi) {  // [lo, hi)
    const int cnt = hi - lo;
    const double sum = prefix[hi] - prefix[lo];
    return (prefix_sq[hi] - prefix_sq[lo]) - sum * sum / cnt;
  };

  double best = std::numeric_limits<double>::infinity();
  int best_cut = 1;
  for (int cut = 1; cut < n; ++cut) {
    const double v = wcss(0, cut) + wcss(cut, n);
    if (v < best) {
      best = v;
      best_cut = cut;
    }
  }
  const double mean_lo = prefix[best_cut] / best_cut;
  const double mean_hi = (prefix[n] - prefix[best_cut]) / (n - best_cut);
  return 0.5 * (mean_lo + mean_hi);
}

namespace {

// Single-task posteriors over every training row; rows not observing the task
// fall back to the fitted prior.
Eigen::MatrixXd single_task_posteriors(const MixtureModel& model, const Dataset& data,
                                       int task) {
  const int n = data.n();
  const int k = model.k();
  const Family& fam = data.tasks[task];
  Eigen::MatrixXd logp(n, k);
  const Eigen::RowVectorXd logpi = model.pi.array().log().matrix().transpose();
  std::vector<Eigen::VectorXd> nat(k);
  for (int r = 0; r < k; ++r) nat[r] = data.X * model.beta[r].col(0);
  for (int i = 0; i < n; ++i) {
    logp.row(i) = logpi;
    if (data.observed(i, task))
      for (int r = 0; r < k; ++r)
        logp(i, r) += log_density(fam, data.Y(i, task), nat[r](i));
    const double mx = logp.row(i).maxCoeff();
    logp.row(i) = (logp.row(i).array() - mx).exp();
    logp.row(i) /= logp.row(i).sum();
  }
  return logp;
}

}  // namespace

TaskSimilarity task_similarity(const Dataset& train, const Dataset& valid,
                               const TaskSimilarityConfig& cfg) {
  const int m = train.m();
  if (valid.m() != m) throw std::invalid_argument("task_similarity: task lists differ");
  if (cfg.per_task_k < 1) throw std::invalid_argument("task_similarity: bad per_task_k");
  const int min_rows = cfg.min_samples_factor * cfg.per_task_k;
  for (int j = 0; j < m; ++j)
    if (static_cast<int>(train.task_rows()[j].size()) < min_rows)
      throw std::invalid_argument("task_similarity: task " + std::to_string(j) +
                                  " observed in fewer than " + std::to_string(min_rows) +
                                  " samples");

  std::vector<double> grid = cfg.lambda_grid;
  if (grid.empty()) grid = {1e-3, 1e-2, 1e-1};

  std::vector<Eigen::MatrixXd> posteriors(m);
  std::vector<char> ok(m, 1);
  TaskSimilarity sim;
  sim.per_task_k = cfg.per_task_k;
  std::mutex warn_mutex;

  parallel_for(m, cfg.jobs, [&](int h) {
    try {
      const Dataset sub_train = select_tasks(train, {h});
      FitConfig fc = cfg.fit;
      fc.k = cfg.per_task_k;

      double best_score = -std::numeric_limits<double>::infinity();
      MixtureModel best_model;
      bool have_valid_rows = !valid.task_rows()[h].empty();
      Dataset sub_score = have_valid_rows ? select_tasks(valid, {h}) : sub_train;
      for (size_t li = 0; li < grid.size(); ++li) {
        PenaltyConfig pen = cfg.pen;
        pen.lambda = grid[li];
        FitConfig fci = fc;
        // same stream for every task: duplicate columns get identical fits
        fci.seed = derive_seed(cfg.fit.seed, 1000, li);
        FitResult fr = fit(sub_train, pen, fci);
        const double score = log_likelihood(fr.model, sub_score);
        if (score > best_score) {
          best_score = score;
          best_model = std::move(fr.model);
        }
      }
      posteriors[h] = single_task_posteriors(best_model, train, h);
    } catch (const std::exception& e) {
      ok[h] = 0;
      std::lock_guard<std::mutex> lock(warn_mutex);
      sim.warnings.push_back("task " + std::to_string(h) + ": " + e.what());
    }
  });

  sim.matrix = Eigen::MatrixXd::Zero(m, m);
  for (int u = 0; u < m; ++u) {
    for (int v = u + 1; v < m; ++v) {
      const double value = (ok[u] && ok[v]) ? nmi(posteriors[u], posteriors[v]) : 0.0;
      sim.matrix(u, v) = value;
      sim.matrix(v, u) = value;
    }
    sim.matrix(u, u) = 1.0;
  }
  return sim;
}

Eigen::MatrixXd kernel_pca(const TaskSimilarity& sim, int dims) {
  const auto& S = sim.matrix;
  const int m = static_cast<int>(S.rows());
  if (S.cols() != m) throw std::invalid_argument("kernel_pca: matrix not square");
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("kernel_pca: matrix not symmetric");
  if (dims < 1 || dims > m) throw std::invalid_argument("kernel_pca: bad dims");

  const Eigen::VectorXd row_mean = S.rowwise().mean();
  const double grand = S.mean();
  Eigen::MatrixXd C = S;
  C.colwise() -= row_mean;
  C.rowwise() -= row_mean.transpose();
  C.array() += grand;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("kernel_pca: eigendecomposition failed");

  Eigen::MatrixXd out(m, dims);
  for (int c = 0; c < dims; ++c) {
    const int src = m - 1 - c;  // eigenvalues ascend
    Eigen::VectorXd v = eig.eigenvectors().col(src);
    int arg = 0;
    for (int i = 1; i < m; ++i)
      if (std::abs(v(i)) > std::abs(v(arg))) arg = i;
    if (v(arg) < 0.0) v = -v;
    const double lam = std::max(0.0, eig.eigenvalues()(src));
    out.col(c) = v * std::sqrt(lam);
  }
  return out;
}

namespace {

double assign_points(const Eigen::MatrixXd& pts, const Eigen::MatrixXd& centers,
                     std::vector<int>& labels) {
  double total = 0.0;
  for (int i = 0; i < pts.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int c = 0; c < centers.rows(); ++c) {
      const double d2 = (pts.row(i) - centers.row(c)).squaredNorm();
      if (d2 < best) {
        best = d2;
        arg = c;
      }
    }
    labels[i] = arg;
    total += best;
  }
  return total;
}

}  // namespace

std::vector<int> cluster_tasks(const Eigen::MatrixXd& embedding, int groups,
                               std::uint64_t seed) {
  const int n = static_cast<int>(embedding.rows());
  if (groups < 1 || groups > n) throw std::invalid_argument("cluster_tasks: bad groups");
  {
    std::vector<int> probe(n);
    Eigen::MatrixXd centers(n, embedding.cols());
    int distinct = 0;
    for (int i = 0; i < n; ++i) {
      bool seen = false;
      for (int c = 0; c < distinct; ++c)
        if ((embedding.row(i) - centers.row(c)).squaredNorm() == 0.0) seen = true;
      if (!seen) centers.row(distinct++) = embedding.row(i);
    }
    if (distinct < groups)
      throw std::invalid_argument("cluster_tasks: fewer distinct points than groups");
  }

  Rng rng(seed);
  std::vector<int> best_labels(n, 0);
  double best_wcss = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < 20; ++restart) {
    // k-means++ seeding
    Eigen::MatrixXd centers(groups, embedding.cols());
    centers.row(0) = embedding.row(rng.uniform_int(n));
    Eigen::VectorXd d2 = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
    for (int c = 1; c < groups; ++c) {
      for (int i = 0; i < n; ++i)
        d2(i) = std::min(d2(i), (embedding.row(i) - centers.row(c - 1)).squaredNorm());
      const double total = d2.sum();
      int pick = 0;
      if (total > 0.0) {
        double u = rng.uniform() * total, cum = 0.0;
        for (int i = 0; i < n; ++i) {
          cum += d2(i);
          if (u < cum) {
            pick = i;
            break;
          }
        }
      } else {
        pick = rng.uniform_int(n);
      }
      centers.row(c) = embedding.row(pick);
    }

    std::vector<int> labels(n, 0);
    double wcss = assign_points(embedding, centers, labels);
    for (int it = 0; it < 100; ++it) {
      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(groups, embedding.cols());
      Eigen::VectorXi counts = Eigen::VectorXi::Zero(groups);
      for (int i = 0; i < n; ++i) {
        sums.row(labels[i]) += embedding.row(i);
        counts(labels[i]) += 1;
      }
      for (int c = 0; c < groups; ++c) {
        if (counts(c) == 0) {
          // reseed an empty cluster at the farthest point
          int far = 0;
          double far_d = -1.0;
          for (int i = 0; i < n; ++i) {
            const double dist = (embedding.row(i) - centers.row(labels[i])).squaredNorm();
            if (dist > far_d) {
              far_d = dist;
              far = i;
            }
          }
          centers.row(c) = embedding.row(far);
        } else {
          centers.row(c) = sums.row(c) / counts(c);
        }
      }
      const double new_wcss = assign_points(embedding, centers, labels);
      if (std::abs(new_wcss - wcss) <= 1e-12 * std::max(1.0, wcss)) {
        wcss = new_wcss;
        break;
      }
      wcss = new_wcss;
    }

    if (wcss < best_wcss) {
      best_wcss = wcss;
      best_labels = labels;
    }
  }
  return best_labels;
}

}  // namespace hermit
