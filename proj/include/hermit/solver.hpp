#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "hermit/dataset.hpp"
#include "hermit/model.hpp"
#include "hermit/penalty.hpp"

namespace hermit {

struct FitConfig {
  int k = 1;
  int t_out = 50;        // max outer GEM iterations
  int t_in = 200;        // max inner APG iterations
  double tol_obj = 1e-6;    // relative tolerance on -loglik/n
  double tol_param = 1e-3;  // relative l-inf parameter tolerance
  double tol_inner = 1e-6;  // inner relative l2 tolerance
  std::uint64_t seed = 0;
  bool use_active_set = true;
};

struct FitReport {
  std::vector<double> objective_trace;  // penalized objective per outer iteration
  int n_outer = 0;
  bool converged = false;
  std::vector<int> inner_iterations;
  std::vector<std::string> warnings;
};

struct FitResult {
  MixtureModel model;
  ResponsibilityMatrix rho;
  FitReport report;
};

// Penalized criterion -log_likelihood/n + R(beta; lambda, pi).  The intercept
// row is exempt from R when the dataset carries an all-ones column and the
// config says so.
double objective(const MixtureModel& model, const Dataset& data,
                 const PenaltyConfig& pen);

FitResult fit(const Dataset& data, const PenaltyConfig& pen, const FitConfig& cfg);

// Deterministic variant taking explicit initial responsibilities (n x k).
FitResult fit(const Dataset& data, const PenaltyConfig& pen, const FitConfig& cfg,
              const Eigen::MatrixXd& init_rho);

// Smooth part of the weighted M-step objective for one component,
//   q(beta_r) = (1/n) sum_i rho_ir sum_{j in Omega_i}
//                 (b_j(eta_ij) - y_ij eta_ij) / a_j,
// with eta = X beta_r (+ offset when given).  The gradient is
// (1/n) X^T [rho_ir * (b'_j(eta_ij) - y_ij) / a_j] over observed entries.
double mstep_smooth_value(const Dataset& data, const Eigen::VectorXd& rho_col,
                          const Eigen::MatrixXd& beta_r,
                          const Eigen::MatrixXd* nat_offset = nullptr);
Eigen::MatrixXd mstep_smooth_grad(const Dataset& data, const Eigen::VectorXd& rho_col,
                                  const Eigen::MatrixXd& beta_r,
                                  const Eigen::MatrixXd* nat_offset = nullptr);

}  // namespace hermit
