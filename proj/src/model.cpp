#include "hermit/model.hpp"

#include <cmath>
#include <stdexcept>

namespace hermit {

namespace {

constexpr double kPiFloor = 1e-8;

void check_compatible(const MixtureModel& model, const Dataset& data) {
  if (model.m() != data.m()) throw std::invalid_argument("model/data task counts differ");
  if (model.d() != data.d()) throw std::invalid_argument("model/data feature dims differ");
  if (static_cast<int>(model.families.size()) != data.m())
    throw std::invalid_argument("model family list length mismatch");
  for (int j = 0; j < data.m(); ++j)
    if (model.families[j].kind != data.tasks[j].kind)
      throw std::invalid_argument("model/data family kinds differ");
}

// row-wise log-sum-exp
double logsumexp_row(const Eigen::RowVectorXd& v) {
  const double mx = v.maxCoeff();
  if (!std::isfinite(mx)) return mx;
  return mx + std::log((v.array() - mx).exp().sum());
}

}  // namespace

void normalize_pi(Eigen::VectorXd& pi) {
  if (pi.size() == 0) throw std::invalid_argument("empty pi");
  pi = pi.cwiseMax(kPiFloor);
  pi /= pi.sum();
}

MixtureModel make_model(std::vector<Eigen::MatrixXd> beta, Eigen::VectorXd pi,
                        std::vector<Family> families, double gamma) {
  if (beta.empty()) throw std::invalid_argument("model needs at least one component");
  const int kk = static_cast<int>(beta.size());
  if (pi.size() != kk) throw std::invalid_argument("pi length != number of components");
  for (const auto& b : beta)
    if (b.rows() != beta[0].rows() || b.cols() != beta[0].cols())
      throw std::invalid_argument("beta slices have inconsistent shapes");
  if (static_cast<int>(families.size()) != beta[0].cols())
    throw std::invalid_argument("family list length != number of tasks");
  if ((pi.array() <= 0.0).any() || std::abs(pi.sum() - 1.0) > 1e-10)
    throw std::invalid_argument("pi must be a strictly positive probability vector");
  MixtureModel model;
  model.beta = std::move(beta);
  model.pi = std::move(pi);
  model.families = std::move(families);
  model.gamma = gamma;
  return model;
}

std::vector<Eigen::MatrixXd> natural_params(const MixtureModel& model,
                                            const Eigen::MatrixXd& X) {
  if (X.cols() != model.d()) throw std::invalid_argument("X column count != model d");
  if (model.has_zeta() && X.rows() != model.zeta[0].rows())
    throw std::invalid_argument("zeta row count != X row count");
  std::vector<Eigen::MatrixXd> nat(model.k());
  for (int r = 0; r < model.k(); ++r) {
    nat[r] = X * model.beta[r];
    if (model.has_zeta()) nat[r] += model.zeta[r];
  }
  return nat;
}

Eigen::MatrixXd obs_log_density_matrix(const MixtureModel& model, const Dataset& data,
                                       const std::vector<int>* task_subset) {
  check_compatible(model, data);
  const auto nat = natural_params(model, data.X);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(data.n(), model.k());
  std::vector<int> all;
  if (!task_subset) {
    all.resize(data.m());
    for (int j = 0; j < data.m(); ++j) all[j] = j;
    task_subset = &all;
  }
  for (int j : *task_subset) {
    if (j < 0 || j >= data.m()) throw std::invalid_argument("task subset index out of range");
    const Family& fam = model.families[j];
    for (int i : data.task_rows()[j]) {
      const double y = data.Y(i, j);
      for (int r = 0; r < model.k(); ++r)
        L(i, r) += log_density(fam, y, nat[r](i, j));
    }
  }
  return L;
}

double log_likelihood(const MixtureModel& model, const Dataset& data) {
  const Eigen::MatrixXd L = obs_log_density_matrix(model, data);
  const Eigen::RowVectorXd logpi = model.pi.array().log().matrix().transpose();
  double total = 0.0;
  for (int i = 0; i < data.n(); ++i)
    total += logsumexp_row(L.row(i) + logpi);
  return total;
}

namespace {

ResponsibilityMatrix responsibilities_impl(const MixtureModel& model, const Dataset& data,
                                           const std::vector<int>* subset) {
  const Eigen::MatrixXd L = obs_log_density_matrix(model, data, subset);
  const Eigen::RowVectorXd logpi = model.pi.array().log().matrix().transpose();
  Eigen::MatrixXd rho(data.n(), model.k());
  for (int i = 0; i < data.n(); ++i) {
    Eigen::RowVectorXd row = L.row(i) + logpi;
    row.array() -= logsumexp_row(row);
    rho.row(i) = row.array().exp();
    rho.row(i) /= rho.row(i).sum();
  }
  return ResponsibilityMatrix{std::move(rho)};
}

}  // namespace

ResponsibilityMatrix responsibilities(const MixtureModel& model, const Dataset& data) {
  return responsibilities_impl(model, data, nullptr);
}

ResponsibilityMatrix responsibilities(const MixtureModel& model, const Dataset& data,
                                      const std::vector<int>& task_subset) {
  return responsibilities_impl(model, data, &task_subset);
}

std::vector<int> cluster_assign(const ResponsibilityMatrix& resp) {
  const auto& rho = resp.rho;
  std::vector<int> labels(rho.rows());
  for (int i = 0; i < rho.rows(); ++i) {
    int best = 0;
    for (int r = 1; r < rho.cols(); ++r)
      if (rho(i, r) > rho(i, best)) best = r;
    labels[i] = best;
  }
  return labels;
}

Eigen::MatrixXd impute(const MixtureModel& model, const Dataset& data) {
  const MixtureModel plain = model.has_zeta() ? model.without_zeta() : model;
  const ResponsibilityMatrix resp = responsibilities(plain, data);
  const auto nat = natural_params(plain, data.X);
  Eigen::MatrixXd out = data.Y;
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < data.m(); ++j) {
      if (data.observed(i, j)) continue;
      double v = 0.0;
      for (int r = 0; r < model.k(); ++r)
        v += resp.rho(i, r) * mean(model.families[j], nat[r](i, j));
      out(i, j) = v;
    }
  }
  return out;
}

Eigen::MatrixXd predict(const MixtureModel& model, const Eigen::MatrixXd& X) {
  const MixtureModel plain = model.has_zeta() ? model.without_zeta() : model;
  const auto nat = natural_params(plain, X);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(X.rows(), model.m());
  for (int r = 0; r < model.k(); ++r)
    for (int j = 0; j < model.m(); ++j)
      for (int i = 0; i < X.rows(); ++i)
        out(i, j) += model.pi(r) * mean(model.families[j], nat[r](i, j));
  return out;
}

}  // namespace hermit
