#include "hermit/moe.hpp"

#include <cmath>
#include <stdexcept>

#include "gem_engine.hpp"

namespace hermit {

namespace {

double logsumexp_row(const Eigen::RowVectorXd& v) {
  const double mx = v.maxCoeff();
  if (!std::isfinite(mx)) return mx;
  return mx + std::log((v.array() - mx).exp().sum());
}

Eigen::MatrixXd log_gate_probs(const GatingModel& gate, const Eigen::MatrixXd& X) {
  if (X.cols() != gate.alpha.rows())
    throw std::invalid_argument("gating_probs: X column count != alpha rows");
  Eigen::MatrixXd lg = X * gate.alpha;
  for (int i = 0; i < lg.rows(); ++i)
    lg.row(i).array() -= logsumexp_row(lg.row(i));
  return lg;
}

}  // namespace

Eigen::MatrixXd gating_probs(const GatingModel& gate, const Eigen::MatrixXd& X) {
  return log_gate_probs(gate, X).array().exp();
}

MoeFitResult fit_moe(const Dataset& data, const PenaltyConfig& pen_beta,
                     double lambda2, const FitConfig& cfg, const MoeOptions& options) {
  if (lambda2 < 0.0) throw std::invalid_argument("fit_moe: lambda2 must be >= 0");
  detail::GemSpec spec;
  spec.mixing = detail::MixingMode::Gate;
  spec.update_mixing = options.update_alpha;
  spec.lambda2_alpha = lambda2;
  auto out = detail::gem_fit(data, pen_beta, cfg, spec);
  MoeFitResult res;
  res.model = std::move(out.model);
  res.gate = GatingModel{std::move(out.alpha)};
  res.rho = std::move(out.rho);
  res.report = std::move(out.report);
  return res;
}

ResponsibilityMatrix moe_responsibilities(const MixtureModel& model,
                                          const GatingModel& gate,
                                          const Dataset& data) {
  const Eigen::MatrixXd L = obs_log_density_matrix(model, data);
  const Eigen::MatrixXd lg = log_gate_probs(gate, data.X);
  Eigen::MatrixXd rho(data.n(), model.k());
  for (int i = 0; i < data.n(); ++i) {
    Eigen::RowVectorXd row = L.row(i) + lg.row(i);
    row.array() -= logsumexp_row(row);
    rho.row(i) = row.array().exp();
    rho.row(i) /= rho.row(i).sum();
  }
  return ResponsibilityMatrix{std::move(rho)};
}

double moe_log_likelihood(const MixtureModel& model, const GatingModel& gate,
                          const Dataset& data) {
  const Eigen::MatrixXd L = obs_log_density_matrix(model, data);
  const Eigen::MatrixXd lg = log_gate_probs(gate, data.X);
  double total = 0.0;
  for (int i = 0; i < data.n(); ++i)
    total += logsumexp_row(L.row(i) + lg.row(i));
  return total;
}

Eigen::MatrixXd predict_moe(const MixtureModel& model, const GatingModel& gate,
                            const Eigen::MatrixXd& X) {
  const MixtureModel plain = model.has_zeta() ? model.without_zeta() : model;
  const Eigen::MatrixXd probs = gating_probs(gate, X);
  const auto nat = natural_params(plain, X);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(X.rows(), model.m());
  for (int r = 0; r < model.k(); ++r)
    for (int j = 0; j < model.m(); ++j)
      for (int i = 0; i < X.rows(); ++i)
        out(i, j) += probs(i, r) * mean(model.families[j], nat[r](i, j));
  return out;
}

double gate_nll(const Eigen::MatrixXd& alpha, const Eigen::MatrixXd& X,
                const Eigen::MatrixXd& rho) {
  const Eigen::MatrixXd xa = X * alpha;
  double s = 0.0;
  for (int i = 0; i < X.rows(); ++i) {
    s += logsumexp_row(xa.row(i));
    s -= rho.row(i).dot(xa.row(i));
  }
  return s / X.rows();
}

Eigen::MatrixXd gate_nll_grad(const Eigen::MatrixXd& alpha, const Eigen::MatrixXd& X,
                              const Eigen::MatrixXd& rho) {
  Eigen::MatrixXd xa = X * alpha;
  for (int i = 0; i < X.rows(); ++i) {
    const double lse = logsumexp_row(xa.row(i));
    xa.row(i) = (xa.row(i).array() - lse).exp();
  }
  return (X.transpose() * (xa - rho)) / X.rows();
}

}  // namespace hermit
