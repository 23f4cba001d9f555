#include "hermit/tune.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hermit/metrics.hpp"
#include "hermit/parallel.hpp"
#include "hermit/rng.hpp"

namespace hermit {

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1)
    throw std::invalid_argument("log_spaced: bad arguments");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i)
    out[i] = std::exp(llo + (lhi - llo) * i / (count - 1));
  return out;
}

namespace {

struct CellFit {
  GridCell cell;
  MixtureModel model;
  std::optional<GatingModel> gate;
  ResponsibilityMatrix rho;
  FitReport report;
};

// true when a is preferable: higher validation likelihood, ties resolved
// toward smaller k, then larger lambda, then the earlier grid position.
bool cell_better(const GridCell& a, const GridCell& b) {
  if (a.ok != b.ok) return a.ok;
  if (!a.ok) return false;
  const double tol = 1e-9 * std::max({1.0, std::abs(a.valid_ll), std::abs(b.valid_ll)});
  if (std::abs(a.valid_ll - b.valid_ll) > tol) return a.valid_ll > b.valid_ll;
  if (a.k != b.k) return a.k < b.k;
  if (a.lambda != b.lambda) return a.lambda > b.lambda;
  return false;
}

}  // namespace

TuneResult tune(const Dataset& train, const Dataset& valid, const GridSpec& grid,
                const FitConfig& base, int jobs) {
  if (train.m() != valid.m())
    throw std::invalid_argument("tune: train/valid task counts differ");
  for (int j = 0; j < train.m(); ++j)
    if (train.tasks[j].kind != valid.tasks[j].kind)
      throw std::invalid_argument("tune: train/valid task lists differ");

  std::vector<double> lambdas = grid.lambdas.empty() ? log_spaced(1e-6, 1e3, 30)
                                                     : grid.lambdas;
  std::vector<int> ks = grid.ks;
  if (ks.empty())
    for (int k = 1; k <= 10; ++k) ks.push_back(k);
  std::vector<PenaltyKind> kinds =
      grid.kinds.empty() ? std::vector<PenaltyKind>{PenaltyKind::Entrywise} : grid.kinds;
  std::vector<double> lambda2s = grid.moe
                                     ? (grid.lambda2s.empty() ? std::vector<double>{1e-3}
                                                              : grid.lambda2s)
                                     : std::vector<double>{0.0};

  std::vector<GridCell> cells;
  for (PenaltyKind kind : kinds)
    for (int k : ks)
      for (double lambda : lambdas)
        for (double lambda2 : lambda2s) {
          GridCell c;
          c.kind = kind;
          c.k = k;
          c.lambda = lambda;
          c.lambda2 = lambda2;
          c.moe = grid.moe;
          cells.push_back(c);
        }

  std::vector<CellFit> fits(cells.size());
  parallel_for(static_cast<int>(cells.size()), jobs, [&](int idx) {
    CellFit& cf = fits[idx];
    cf.cell = cells[idx];
    PenaltyConfig pen;
    pen.kind = cf.cell.kind;
    pen.lambda = cf.cell.lambda;
    pen.gamma = grid.gamma;
    pen.exempt_intercept = grid.exempt_intercept;
    FitConfig cfg = base;
    cfg.k = cf.cell.k;
    cfg.seed = derive_seed(base.seed, 7001, idx);
    try {
      if (grid.moe) {
        MoeFitResult fr = fit_moe(train, pen, cf.cell.lambda2, cfg);
        cf.cell.valid_ll = moe_log_likelihood(fr.model, fr.gate, valid);
        cf.model = std::move(fr.model);
        cf.gate = std::move(fr.gate);
        cf.rho = std::move(fr.rho);
        cf.report = std::move(fr.report);
      } else {
        FitResult fr = fit(train, pen, cfg);
        cf.cell.valid_ll = log_likelihood(fr.model.without_zeta(), valid);
        cf.model = std::move(fr.model);
        cf.rho = std::move(fr.rho);
        cf.report = std::move(fr.report);
      }
      cf.cell.converged = cf.report.converged;
      cf.cell.n_outer = cf.report.n_outer;
      cf.cell.ok = std::isfinite(cf.cell.valid_ll);
      if (!cf.cell.ok) cf.cell.error = "non-finite validation likelihood";
    } catch (const std::exception& e) {
      cf.cell.ok = false;
      cf.cell.error = e.what();
    }
  });

  int best = -1;
  for (size_t i = 0; i < fits.size(); ++i)
    if (best < 0 || cell_better(fits[i].cell, fits[best].cell))
      best = static_cast<int>(i);
  if (best < 0 || !fits[best].cell.ok) {
    std::string msg = "tune: every grid cell failed";
    for (const auto& cf : fits)
      if (!cf.cell.error.empty()) msg += "; " + cf.cell.error;
    throw std::runtime_error(msg);
  }

  TuneResult out;
  out.model = std::move(fits[best].model);
  out.gate = std::move(fits[best].gate);
  out.rho = std::move(fits[best].rho);
  out.report = std::move(fits[best].report);
  out.best = fits[best].cell;
  out.table.reserve(fits.size());
  for (auto& cf : fits) out.table.push_back(cf.cell);
  return out;
}

PredictionMetrics prediction_metrics(const Eigen::MatrixXd& pred, const Dataset& truth,
                                     const BoolMask& eval_mask) {
  if (pred.rows() != truth.n() || pred.cols() != truth.m())
    throw std::invalid_argument("prediction_metrics: shape mismatch");
  BoolMask mask = eval_mask && truth.observed;

  PredictionMetrics out;
  out.n_eval = static_cast<int>(mask.count());
  if (out.n_eval == 0) return out;

  const auto per_task = nmse_per_task(pred, truth.Y, mask, truth.tasks);
  double sum_all = 0.0, sum_g = 0.0, sum_p = 0.0;
  int cnt_all = 0, cnt_g = 0, cnt_p = 0;
  for (int j = 0; j < truth.m(); ++j) {
    if (!per_task[j]) continue;
    if (truth.tasks[j].kind == FamilyKind::Gaussian) {
      sum_g += *per_task[j];
      ++cnt_g;
      sum_all += *per_task[j];
      ++cnt_all;
    } else if (truth.tasks[j].kind == FamilyKind::Poisson) {
      sum_p += *per_task[j];
      ++cnt_p;
      sum_all += *per_task[j];
      ++cnt_all;
    }
  }
  if (cnt_all) out.nmse = sum_all / cnt_all;
  if (cnt_g) out.nmse_gaussian = sum_g / cnt_g;
  if (cnt_p) out.nmse_poisson = sum_p / cnt_p;

  double sum_auc = 0.0;
  int cnt_auc = 0;
  for (int j = 0; j < truth.m(); ++j) {
    if (truth.tasks[j].kind != FamilyKind::Bernoulli) continue;
    std::vector<double> s;
    std::vector<int> lbl;
    for (int i = 0; i < truth.n(); ++i) {
      if (!mask(i, j)) continue;
      s.push_back(pred(i, j));
      lbl.push_back(truth.Y(i, j) > 0.5 ? 1 : 0);
    }
    if (s.empty()) continue;
    Eigen::VectorXd sv = Eigen::Map<Eigen::VectorXd>(s.data(), s.size());
    const auto auc = rank_auc(sv, lbl);
    if (auc) {
      sum_auc += *auc;
      ++cnt_auc;
    }
  }
  if (cnt_auc) out.aauc = sum_auc / cnt_auc;
  return out;
}

PredictionMetrics impute_benchmark(const MixtureModel& model, const Dataset& test,
                                   double hide_fraction, std::uint64_t seed) {
  if (hide_fraction < 0.0 || hide_fraction >= 1.0)
    throw std::invalid_argument("impute_benchmark: hide_fraction must be in [0,1)");
  if (hide_fraction == 0.0) return PredictionMetrics{};

  Rng rng(seed);
  BoolMask hidden = BoolMask::Constant(test.n(), test.m(), false);
  std::vector<int> obs_cols;
  for (int i = 0; i < test.n(); ++i) {
    obs_cols.clear();
    for (int j = 0; j < test.m(); ++j)
      if (test.observed(i, j)) obs_cols.push_back(j);
    const int cnt = static_cast<int>(obs_cols.size());
    int nh = static_cast<int>(std::lround(hide_fraction * cnt));
    nh = std::min(nh, cnt - 1);  // conditioning needs a nonempty remainder
    if (nh <= 0) continue;
    for (int t = 0; t < nh; ++t) {
      const int pick = t + rng.uniform_int(cnt - t);
      std::swap(obs_cols[t], obs_cols[pick]);
      hidden(i, obs_cols[t]) = true;
    }
  }

  BoolMask remaining = test.observed && !hidden;
  Dataset masked(test.X, test.Y, remaining, test.tasks);
  const Eigen::MatrixXd pred = impute(model, masked);
  return prediction_metrics(pred, test, hidden);
}

}  // namespace hermit
