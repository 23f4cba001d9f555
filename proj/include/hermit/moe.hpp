#pragma once

#include <Eigen/Dense>

#include "hermit/dataset.hpp"
#include "hermit/model.hpp"
#include "hermit/penalty.hpp"
#include "hermit/solver.hpp"

namespace hermit {

// Multinomial gate: mixture probabilities softmax(x_i alpha).
struct GatingModel {
  Eigen::MatrixXd alpha;  // d x k
};

struct MoeOptions {
  bool update_alpha = true;  // false keeps the gate frozen at its initial zero
};

struct MoeFitResult {
  MixtureModel model;  // pi reported as the column means of the gating probs
  GatingModel gate;
  ResponsibilityMatrix rho;
  FitReport report;
};

// Row-wise softmax of X*alpha, max-shifted.
Eigen::MatrixXd gating_probs(const GatingModel& gate, const Eigen::MatrixXd& X);

// Penalized mixture-of-experts estimation: the E-step prior is the gate
// probability, alpha carries an entrywise l1 penalty of strength lambda2
// (intercept row exempt, matching the beta convention), and the beta penalty
// is applied unweighted.
MoeFitResult fit_moe(const Dataset& data, const PenaltyConfig& pen_beta,
                     double lambda2, const FitConfig& cfg,
                     const MoeOptions& options = {});

// E-step posteriors under the gate prior.
ResponsibilityMatrix moe_responsibilities(const MixtureModel& model,
                                          const GatingModel& gate,
                                          const Dataset& data);

// Gate-weighted data log-likelihood (the per-sample prior replaces pi).
double moe_log_likelihood(const MixtureModel& model, const GatingModel& gate,
                          const Dataset& data);

// Feature-only prediction sum_r gate_ir b'(x_i beta_jr).
Eigen::MatrixXd predict_moe(const MixtureModel& model, const GatingModel& gate,
                            const Eigen::MatrixXd& X);

// Smooth part of the alpha subproblem,
//   (1/n) sum_i [log sum_r exp(x_i alpha_r) - sum_r rho_ir x_i alpha_r],
// and its gradient (1/n) X^T (softmax(X alpha) - rho).
double gate_nll(const Eigen::MatrixXd& alpha, const Eigen::MatrixXd& X,
                const Eigen::MatrixXd& rho);
Eigen::MatrixXd gate_nll_grad(const Eigen::MatrixXd& alpha, const Eigen::MatrixXd& X,
                              const Eigen::MatrixXd& rho);

}  // namespace hermit
