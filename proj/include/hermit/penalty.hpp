#pragma once

#include <Eigen/Dense>
#include <vector>

namespace hermit {

enum class PenaltyKind { Entrywise, RowGroup };

struct PenaltyConfig {
  PenaltyKind kind = PenaltyKind::Entrywise;
  double lambda = 0.0;
  double gamma = 1.0;  // pi weight exponent, one of {0, 1/2, 1}
  // Skip the first coefficient row when the dataset carries an all-ones
  // intercept column.
  bool exempt_intercept = true;
};

// l1 or sum-of-row-l2 norm of the rows starting at `first_row`.
double block_norm(const Eigen::MatrixXd& b, PenaltyKind kind, int first_row = 0);

// R(beta; lambda, pi) = lambda * sum_r pi_r^gamma * norm(beta_r), rows below
// `first_row` exempt.
double penalty_value(const std::vector<Eigen::MatrixXd>& beta, const Eigen::VectorXd& pi,
                     const PenaltyConfig& cfg, int first_row = 0);

// Exact minimizer of 0.5*||b - z||_F^2 + threshold * norm(b).
Eigen::MatrixXd prox(const Eigen::MatrixXd& z, double threshold, PenaltyKind kind);

// In-place prox with one threshold per row (0 exempts a row).
void prox_inplace(Eigen::Ref<Eigen::MatrixXd> z, const Eigen::ArrayXd& row_thresholds,
                  PenaltyKind kind);

}  // namespace hermit
