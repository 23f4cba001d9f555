#include <doctest.h>

#include <cmath>

#include "hermit/datagen.hpp"
#include "hermit/robust.hpp"
#include "test_helpers.hpp"

using namespace hermit;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

bool trace_nonincreasing(const std::vector<double>& trace, double slack = 1e-8) {
  for (size_t t = 1; t < trace.size(); ++t)
    if (trace[t] > trace[t - 1] + slack) return false;
  return true;
}

SynthData small_gaussian_data(std::uint64_t seed) {
  SynthSpec sp;
  sp.n = 60;
  sp.d = 4;
  sp.m_gaussian = 2;
  sp.m_bernoulli = 1;
  sp.m_poisson = 0;
  sp.k_true = 1;
  sp.sparsity = 2;
  sp.seed = seed;
  return generate(sp);
}

}  // namespace

TEST_CASE("outlier_scores matches the triple loop") {
  std::vector<MatrixXd> zeta(2, MatrixXd::Zero(5, 3));
  CHECK(outlier_scores(zeta).cwiseAbs().maxCoeff() == 0.0);

  zeta[0](1, 1) = 3.0;
  VectorXd s = outlier_scores(zeta);
  CHECK(s(1) == doctest::Approx(3.0));
  CHECK(s(0) == 0.0);

  Rng rng(5);
  for (auto& slice : zeta)
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 3; ++j) slice(i, j) = rng.normal();
  s = outlier_scores(zeta);
  for (int i = 0; i < 5; ++i) {
    double sq = 0.0;
    for (int r = 0; r < 2; ++r)
      for (int j = 0; j < 3; ++j) sq += zeta[r](i, j) * zeta[r](i, j);
    CHECK(s(i) == doctest::Approx(std::sqrt(sq)).epsilon(1e-12));
  }
}

TEST_CASE("huge lambda2 reproduces the plain fit with zero shifts") {
  const SynthData data = small_gaussian_data(41);
  PenaltyConfig pen;
  pen.lambda = 0.05;
  RobustConfig rc;
  rc.lambda2 = 1e6;
  rc.base.k = 1;
  rc.base.seed = 2;
  const FitResult robust = fit_robust(data.data, pen, rc);
  CHECK(outlier_scores(robust.model.zeta).cwiseAbs().maxCoeff() == 0.0);

  FitConfig cfg = rc.base;
  const FitResult plain = fit(data.data, pen, cfg);
  CHECK((robust.model.beta[0] - plain.model.beta[0]).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(trace_nonincreasing(robust.report.objective_trace));
}

TEST_CASE("a grossly shifted sample earns the largest mean shift") {
  SynthData data = small_gaussian_data(43);
  MatrixXd Y = data.data.Y;
  Y(7, 0) += 100.0;
  Y(7, 1) += 100.0;
  const Dataset dirty(data.data.X, Y, data.data.observed, data.data.tasks);

  PenaltyConfig pen;
  pen.lambda = 0.02;
  RobustConfig rc;
  rc.lambda2 = 0.05;
  rc.base.k = 1;
  rc.base.seed = 3;
  const FitResult res = fit_robust(dirty, pen, rc);
  const VectorXd scores = outlier_scores(res.model.zeta);
  int arg = 0;
  for (int i = 1; i < scores.size(); ++i)
    if (scores(i) > scores(arg)) arg = i;
  CHECK(arg == 7);
  CHECK(scores(7) > 10.0);
  CHECK(trace_nonincreasing(res.report.objective_trace));
}

TEST_CASE("zeta prox zeroes exactly the small sample slices") {
  // covered at the operator level: rows with norm <= threshold vanish
  std::vector<MatrixXd> zeta(2, MatrixXd::Zero(4, 2));
  Rng rng(9);
  for (auto& slice : zeta)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 2; ++j) slice(i, j) = rng.normal();
  const VectorXd scores = outlier_scores(zeta);

  // emulate the sample-wise group prox at threshold t
  const double t = scores(1);
  for (int i = 0; i < 4; ++i) {
    const double norm = scores(i);
    const double scale = norm <= t ? 0.0 : 1.0 - t / norm;
    for (auto& slice : zeta) slice.row(i) *= scale;
  }
  const VectorXd after = outlier_scores(zeta);
  for (int i = 0; i < 4; ++i) {
    if (scores(i) <= t)
      CHECK(after(i) == 0.0);
    else
      CHECK(after(i) > 0.0);
  }
}

TEST_CASE("two_stage with p_clean 0 keeps everything") {
  const SynthData data = small_gaussian_data(47);
  PenaltyConfig pen;
  pen.lambda = 0.05;
  RobustConfig rc;
  rc.lambda2 = 0.2;
  rc.base.k = 1;
  rc.base.seed = 5;
  rc.p_clean = 0.0;
  const TwoStageResult ts = two_stage(data.data, pen, rc);
  CHECK(ts.kept_rows.size() == static_cast<size_t>(data.data.n()));
  CHECK(ts.removed_rows.empty());

  const FitResult plain = fit(data.data, pen, rc.base);
  CHECK((ts.model.beta[0] - plain.model.beta[0]).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("two_stage removes the top-score rows") {
  SynthData data = small_gaussian_data(53);
  MatrixXd Y = data.data.Y;
  Y(3, 0) += 80.0;
  Y(11, 0) -= 80.0;
  Y(11, 1) += 80.0;
  const Dataset dirty(data.data.X, Y, data.data.observed, data.data.tasks);

  PenaltyConfig pen;
  pen.lambda = 0.02;
  RobustConfig rc;
  rc.lambda2 = 0.05;
  rc.base.k = 1;
  rc.base.seed = 6;
  rc.p_clean = 2.0 / 60.0;
  const TwoStageResult ts = two_stage(dirty, pen, rc);
  CHECK(ts.removed_rows.size() == 2);
  CHECK(std::find(ts.removed_rows.begin(), ts.removed_rows.end(), 3) !=
        ts.removed_rows.end());
  CHECK(std::find(ts.removed_rows.begin(), ts.removed_rows.end(), 11) !=
        ts.removed_rows.end());
  CHECK(ts.kept_rows.size() == 58);
}
