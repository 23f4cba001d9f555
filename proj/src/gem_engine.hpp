#pragma once

#include <Eigen/Dense>

#include "hermit/dataset.hpp"
#include "hermit/model.hpp"
#include "hermit/penalty.hpp"
#include "hermit/solver.hpp"

namespace hermit::detail {

enum class MixingMode { Pi, Gate };

// Extensions layered on the shared GEM loop.  All modes alternate an E-step
// with guarded M-step updates, so the penalized objective trace is
// nonincreasing by construction.
struct GemSpec {
  MixingMode mixing = MixingMode::Pi;
  bool update_mixing = true;
  bool with_zeta = false;
  double lambda2_zeta = 0.0;   // sample-wise group penalty on the mean shifts
  double lambda2_alpha = 0.0;  // entrywise penalty on the gate coefficients
  const Eigen::MatrixXd* init_rho = nullptr;
};

struct GemOutput {
  MixtureModel model;
  Eigen::MatrixXd alpha;  // d x k in Gate mode, empty otherwise
  ResponsibilityMatrix rho;
  FitReport report;
};

GemOutput gem_fit(const Dataset& data, const PenaltyConfig& pen, const FitConfig& cfg,
                  const GemSpec& spec);

}  // namespace hermit::detail
