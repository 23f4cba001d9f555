#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hermit/dataset.hpp"
#include "hermit/moe.hpp"
#include "hermit/model.hpp"
#include "hermit/penalty.hpp"
#include "hermit/solver.hpp"

namespace hermit {

std::vector<double> log_spaced(double lo, double hi, int count);

// Hyper-parameter grid.  Every cell is fitted on the training data, scored by
// held-out log-likelihood, and ties prefer simpler models (smaller k, then
// larger lambda).
struct GridSpec {
  std::vector<double> lambdas;       // default: 30 log-spaced in [1e-6, 1e3]
  std::vector<int> ks;               // default: 1..10
  std::vector<PenaltyKind> kinds;    // default: {Entrywise}
  bool moe = false;
  std::vector<double> lambda2s;      // gate penalty grid when moe
  double gamma = 1.0;
  bool exempt_intercept = true;
};

struct GridCell {
  PenaltyKind kind = PenaltyKind::Entrywise;
  int k = 1;
  double lambda = 0.0;
  double lambda2 = 0.0;
  bool moe = false;
  bool ok = false;
  double valid_ll = 0.0;
  bool converged = false;
  int n_outer = 0;
  std::string error;
};

struct TuneResult {
  MixtureModel model;
  std::optional<GatingModel> gate;
  ResponsibilityMatrix rho;
  FitReport report;
  GridCell best;
  std::vector<GridCell> table;
};

TuneResult tune(const Dataset& train, const Dataset& valid, const GridSpec& grid,
                const FitConfig& base, int jobs = 1);

// Shared scoreboard for imputation and feature-based prediction.
struct PredictionMetrics {
  std::optional<double> nmse;           // Gaussian + Poisson tasks
  std::optional<double> nmse_gaussian;
  std::optional<double> nmse_poisson;
  std::optional<double> aauc;           // mean AUC over Bernoulli tasks
  int n_eval = 0;                       // evaluated target entries
};

// Scores pred against the observed entries of `truth` selected by eval_mask.
PredictionMetrics prediction_metrics(const Eigen::MatrixXd& pred, const Dataset& truth,
                                     const BoolMask& eval_mask);

// Hide a fraction of the observed test targets (never a whole row), condition
// the responsibilities on the remainder, impute, and score at the hidden
// positions.
PredictionMetrics impute_benchmark(const MixtureModel& model, const Dataset& test,
                                   double hide_fraction, std::uint64_t seed);

}  // namespace hermit
