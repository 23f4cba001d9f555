#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "hermit/dataset.hpp"

namespace hermit {

// Normalized mutual information between two soft partitions (rows on the
// simplex): I(P,Q)/sqrt(I(P,P) I(Q,Q)) with marginals approximated by column
// means and joints by (1/n) sum_i P_ia Q_ib.  Returns 0 when either
// self-information vanishes.
double nmi(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q);

Eigen::MatrixXd one_hot(const std::vector<int>& labels, int k);

// Wilcoxon-Mann-Whitney statistic; ties count 1/2.  Missing when only one
// class is present.
std::optional<double> rank_auc(const Eigen::VectorXd& scores,
                               const std::vector<int>& labels);

// Per-task MSE over masked positions divided by the population variance of
// the masked truth.  Poisson tasks are log(1+y)-transformed on both sides.
// Tasks with fewer than 2 masked entries or zero variance are skipped.
std::vector<std::optional<double>> nmse_per_task(const Eigen::MatrixXd& pred,
                                                 const Eigen::MatrixXd& truth,
                                                 const BoolMask& mask,
                                                 const std::vector<Family>& tasks);

// Mean of nmse_per_task over the evaluated tasks.
std::optional<double> nmse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth,
                           const BoolMask& mask, const std::vector<Family>& tasks);

// Permutation sigma (true slot -> estimated slice) minimizing
// sum_r ||beta_hat[sigma(r)] - beta_true[r]||_F by exhaustive search, k <= 8.
std::vector<int> match_components(const std::vector<Eigen::MatrixXd>& beta_hat,
                                  const std::vector<Eigen::MatrixXd>& beta_true);

// Feature-selection AUC: |vec(beta_hat)| scored against the true support
// after component matching.  Intercept rows are dropped when exempt.
std::optional<double> feature_selection_auc(
    const std::vector<Eigen::MatrixXd>& beta_hat,
    const std::vector<Eigen::MatrixXd>& beta_true, bool skip_intercept_row);

}  // namespace hermit
