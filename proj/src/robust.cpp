#include "hermit/robust.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "gem_engine.hpp"

namespace hermit {

FitResult fit_robust(const Dataset& data, const PenaltyConfig& pen,
                     const RobustConfig& rcfg) {
  if (rcfg.lambda2 < 0.0) throw std::invalid_argument("lambda2 must be >= 0");
  detail::GemSpec spec;
  spec.with_zeta = true;
  spec.lambda2_zeta = rcfg.lambda2;
  auto out = detail::gem_fit(data, pen, rcfg.base, spec);
  return FitResult{std::move(out.model), std::move(out.rho), std::move(out.report)};
}

Eigen::VectorXd outlier_scores(const std::vector<Eigen::MatrixXd>& zeta) {
  if (zeta.empty()) throw std::invalid_argument("outlier_scores: zeta absent");
  Eigen::ArrayXd sq = Eigen::ArrayXd::Zero(zeta[0].rows());
  for (const auto& slice : zeta) sq += slice.array().square().rowwise().sum();
  return sq.sqrt().matrix();
}

TwoStageResult two_stage(const Dataset& data, const PenaltyConfig& pen,
                         const RobustConfig& rcfg) {
  if (rcfg.p_clean < 0.0 || rcfg.p_clean >= 1.0)
    throw std::invalid_argument("p_clean must be in [0, 1)");

  FitResult stage1 = fit_robust(data, pen, rcfg);
  const Eigen::VectorXd scores = outlier_scores(stage1.model.zeta);

  const int n = data.n();
  const int n_remove = static_cast<int>(std::ceil(rcfg.p_clean * n));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores(a) != scores(b)) return scores(a) > scores(b);
    return a < b;
  });

  std::vector<int> removed(order.begin(), order.begin() + n_remove);
  std::sort(removed.begin(), removed.end());
  std::vector<int> kept;
  kept.reserve(n - n_remove);
  {
    size_t p = 0;
    for (int i = 0; i < n; ++i) {
      if (p < removed.size() && removed[p] == i) {
        ++p;
        continue;
      }
      kept.push_back(i);
    }
  }

  const Dataset cleaned = select_rows(data, kept);
  FitResult stage2 = fit(cleaned, pen, rcfg.base);

  for (int j = 0; j < cleaned.m(); ++j) {
    if (cleaned.task_rows()[j].empty())
      stage2.report.warnings.push_back("task " + std::to_string(j) +
                                       " lost all observations after cleaning");
  }

  TwoStageResult out;
  out.model = std::move(stage2.model);
  out.kept_rows = std::move(kept);
  out.removed_rows = std::move(removed);
  out.rho = std::move(stage2.rho);
  out.report = std::move(stage2.report);
  out.scores = scores;
  return out;
}

}  // namespace hermit
