#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hermit/dataset.hpp"
#include "hermit/model.hpp"
#include "hermit/penalty.hpp"
#include "hermit/solver.hpp"

namespace hermit {

struct RobustConfig {
  double lambda2 = 0.0;  // strength of the sample-wise group penalty on zeta
  FitConfig base;
  double p_clean = 0.0;  // fraction removed before the second-stage refit
};

// Joint (beta, zeta) estimation; the returned model carries the fitted mean
// shifts.
FitResult fit_robust(const Dataset& data, const PenaltyConfig& pen,
                     const RobustConfig& rcfg);

// score_i = sqrt(sum_{j,r} zeta_ijr^2)
Eigen::VectorXd outlier_scores(const std::vector<Eigen::MatrixXd>& zeta);

struct TwoStageResult {
  MixtureModel model;           // second-stage fit on the cleaned data
  std::vector<int> kept_rows;   // ascending indices into the original data
  std::vector<int> removed_rows;
  ResponsibilityMatrix rho;     // second-stage responsibilities (cleaned rows)
  FitReport report;             // second-stage report
  Eigen::VectorXd scores;       // first-stage outlier scores, all rows
};

// Stage 1: fit_robust; remove the ceil(p_clean*n) highest-score samples
// (score ties resolved toward the smaller index); stage 2: plain fit on the
// remainder.
TwoStageResult two_stage(const Dataset& data, const PenaltyConfig& pen,
                         const RobustConfig& rcfg);

}  // namespace hermit
