#include "hermit/penalty.hpp"

#include <cmath>
#include <stdexcept>

namespace hermit {

double block_norm(const Eigen::MatrixXd& b, PenaltyKind kind, int first_row) {
  const int d = static_cast<int>(b.rows());
  if (first_row >= d) return 0.0;
  const auto block = b.bottomRows(d - first_row);
  if (kind == PenaltyKind::Entrywise) return block.array().abs().sum();
  return block.rowwise().norm().sum();
}

double penalty_value(const std::vector<Eigen::MatrixXd>& beta, const Eigen::VectorXd& pi,
                     const PenaltyConfig& cfg, int first_row) {
  if (static_cast<int>(beta.size()) != pi.size())
    throw std::invalid_argument("beta slice count != pi length");
  if (cfg.lambda < 0.0) throw std::invalid_argument("lambda must be non-negative");
  double total = 0.0;
  for (int r = 0; r < pi.size(); ++r)
    total += std::pow(pi(r), cfg.gamma) * block_norm(beta[r], cfg.kind, first_row);
  return cfg.lambda * total;
}

void prox_inplace(Eigen::Ref<Eigen::MatrixXd> z, const Eigen::ArrayXd& row_thresholds,
                  PenaltyKind kind) {
  if (row_thresholds.size() != z.rows())
    throw std::invalid_argument("row threshold length != row count");
  if ((row_thresholds < 0.0).any())
    throw std::invalid_argument("negative prox threshold");
  if (kind == PenaltyKind::Entrywise) {
    for (int i = 0; i < z.rows(); ++i) {
      const double t = row_thresholds(i);
      if (t == 0.0) continue;
      z.row(i) = z.row(i).array().sign() * (z.row(i).array().abs() - t).max(0.0);
    }
    return;
  }
  for (int i = 0; i < z.rows(); ++i) {
    const double t = row_thresholds(i);
    if (t == 0.0) continue;
    const double norm = z.row(i).norm();
    if (norm <= t)
      z.row(i).setZero();
    else
      z.row(i) *= 1.0 - t / norm;
  }
}

Eigen::MatrixXd prox(const Eigen::MatrixXd& z, double threshold, PenaltyKind kind) {
  if (threshold < 0.0) throw std::invalid_argument("negative prox threshold");
  Eigen::MatrixXd out = z;
  prox_inplace(out, Eigen::ArrayXd::Constant(z.rows(), threshold), kind);
  return out;
}

}  // namespace hermit
