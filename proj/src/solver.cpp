#include "hermit/solver.hpp"

#include <stdexcept>

#include "gem_engine.hpp"

namespace hermit {

double objective(const MixtureModel& model, const Dataset& data,
                 const PenaltyConfig& pen) {
  const int first_row = (pen.exempt_intercept && data.has_intercept) ? 1 : 0;
  return -log_likelihood(model, data) / data.n() +
         penalty_value(model.beta, model.pi, pen, first_row);
}

FitResult fit(const Dataset& data, const PenaltyConfig& pen, const FitConfig& cfg) {
  detail::GemSpec spec;
  auto out = detail::gem_fit(data, pen, cfg, spec);
  return FitResult{std::move(out.model), std::move(out.rho), std::move(out.report)};
}

FitResult fit(const Dataset& data, const PenaltyConfig& pen, const FitConfig& cfg,
              const Eigen::MatrixXd& init_rho) {
  detail::GemSpec spec;
  spec.init_rho = &init_rho;
  auto out = detail::gem_fit(data, pen, cfg, spec);
  return FitResult{std::move(out.model), std::move(out.rho), std::move(out.report)};
}

namespace {

void check_mstep_args(const Dataset& data, const Eigen::VectorXd& rho_col,
                      const Eigen::MatrixXd& beta_r, const Eigen::MatrixXd* offset) {
  if (rho_col.size() != data.n()) throw std::invalid_argument("rho length != n");
  if (beta_r.rows() != data.d() || beta_r.cols() != data.m())
    throw std::invalid_argument("beta slice shape mismatch");
  if (offset && (offset->rows() != data.n() || offset->cols() != data.m()))
    throw std::invalid_argument("offset shape mismatch");
}

}  // namespace

double mstep_smooth_value(const Dataset& data, const Eigen::VectorXd& rho_col,
                          const Eigen::MatrixXd& beta_r,
                          const Eigen::MatrixXd* nat_offset) {
  check_mstep_args(data, rho_col, beta_r, nat_offset);
  const Eigen::MatrixXd eta = data.X * beta_r;
  double total = 0.0;
  for (int j = 0; j < data.m(); ++j) {
    const Family& fam = data.tasks[j];
    double sj = 0.0;
    for (int i : data.task_rows()[j]) {
      const double nat = eta(i, j) + (nat_offset ? (*nat_offset)(i, j) : 0.0);
      sj += rho_col(i) * (cumulant(fam, nat) - data.Y(i, j) * nat);
    }
    total += sj / fam.dispersion;
  }
  return total / data.n();
}

Eigen::MatrixXd mstep_smooth_grad(const Dataset& data, const Eigen::VectorXd& rho_col,
                                  const Eigen::MatrixXd& beta_r,
                                  const Eigen::MatrixXd* nat_offset) {
  check_mstep_args(data, rho_col, beta_r, nat_offset);
  const Eigen::MatrixXd eta = data.X * beta_r;
  Eigen::MatrixXd gmat = Eigen::MatrixXd::Zero(data.n(), data.m());
  for (int j = 0; j < data.m(); ++j) {
    const Family& fam = data.tasks[j];
    for (int i : data.task_rows()[j]) {
      const double nat = eta(i, j) + (nat_offset ? (*nat_offset)(i, j) : 0.0);
      gmat(i, j) = rho_col(i) * (mean(fam, nat) - data.Y(i, j)) / fam.dispersion;
    }
  }
  return (data.X.transpose() * gmat) / data.n();
}

}  // namespace hermit
