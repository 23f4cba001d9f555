#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "hermit/dataset.hpp"
#include "hermit/expfamily.hpp"

namespace hermit {

// Mixture regression parameters.  beta holds one d x m coefficient matrix per
// component; zeta, when present, holds one n x m mean-shift matrix per
// component, tied to the training sample it was fitted on.
struct MixtureModel {
  std::vector<Eigen::MatrixXd> beta;
  Eigen::VectorXd pi;
  std::vector<Family> families;
  std::vector<Eigen::MatrixXd> zeta;
  double gamma = 1.0;

  int k() const { return static_cast<int>(beta.size()); }
  int d() const { return beta.empty() ? 0 : static_cast<int>(beta[0].rows()); }
  int m() const { return beta.empty() ? 0 : static_cast<int>(beta[0].cols()); }
  bool has_zeta() const { return !zeta.empty(); }

  MixtureModel without_zeta() const {
    MixtureModel out = *this;
    out.zeta.clear();
    return out;
  }
};

struct ResponsibilityMatrix {
  Eigen::MatrixXd rho;  // n x k, rows on the simplex
};

// pi floored at 1e-8 and renormalized; keeps log(pi) finite.
void normalize_pi(Eigen::VectorXd& pi);

MixtureModel make_model(std::vector<Eigen::MatrixXd> beta, Eigen::VectorXd pi,
                        std::vector<Family> families, double gamma = 1.0);

// Natural parameters x_i beta_jr (+ zeta_ijr when present), one n x m slice
// per component.
std::vector<Eigen::MatrixXd> natural_params(const MixtureModel& model,
                                            const Eigen::MatrixXd& X);

// n x k matrix of sum_{j in Omega_i ^ subset} log f(y_ij | nat_ijr).
// An empty subset pointer means all tasks.
Eigen::MatrixXd obs_log_density_matrix(const MixtureModel& model, const Dataset& data,
                                       const std::vector<int>* task_subset = nullptr);

double log_likelihood(const MixtureModel& model, const Dataset& data);

ResponsibilityMatrix responsibilities(const MixtureModel& model, const Dataset& data);
ResponsibilityMatrix responsibilities(const MixtureModel& model, const Dataset& data,
                                      const std::vector<int>& task_subset);

// argmax with ties to the smallest component index
std::vector<int> cluster_assign(const ResponsibilityMatrix& rho);

// Posterior-weighted conditional means at unobserved positions; observed
// positions pass through.  Mean shifts are ignored (prediction-time zeta = 0).
Eigen::MatrixXd impute(const MixtureModel& model, const Dataset& data);

// Feature-only prediction, prior-weighted: sum_r pi_r b'(x beta_r).
Eigen::MatrixXd predict(const MixtureModel& model, const Eigen::MatrixXd& X);

}  // namespace hermit
