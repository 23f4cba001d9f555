#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "hermit/apg.hpp"
#include "hermit/rng.hpp"

using namespace hermit;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

ApgProblem lasso_problem(const MatrixXd& A, const VectorXd& b, double lam) {
  ApgProblem prob;
  prob.smooth_value = [&A, &b](const VectorXd& x) {
    return 0.5 * (A * x - b).squaredNorm();
  };
  prob.smooth_grad = [&A, &b](const VectorXd& x, VectorXd& g) {
    g = A.transpose() * (A * x - b);
  };
  prob.apply_prox = [lam](VectorXd& x, double t) {
    const double thr = t * lam;
    for (int i = 0; i < x.size(); ++i)
      x(i) = x(i) > thr ? x(i) - thr : (x(i) < -thr ? x(i) + thr : 0.0);
  };
  prob.penalty_value = [lam](const VectorXd& x) { return lam * x.lpNorm<1>(); };
  return prob;
}

// cyclic coordinate descent oracle for the lasso
VectorXd cd_lasso(const MatrixXd& A, const VectorXd& b, double lam, int sweeps = 4000) {
  VectorXd x = VectorXd::Zero(A.cols());
  const VectorXd col_sq = A.colwise().squaredNorm();
  VectorXd resid = b;
  for (int s = 0; s < sweeps; ++s) {
    for (int j = 0; j < A.cols(); ++j) {
      const double old = x(j);
      const double rho = A.col(j).dot(resid) + col_sq(j) * old;
      double next = 0.0;
      if (rho > lam)
        next = (rho - lam) / col_sq(j);
      else if (rho < -lam)
        next = (rho + lam) / col_sq(j);
      if (next != old) resid += A.col(j) * (old - next);
      x(j) = next;
    }
  }
  return x;
}

}  // namespace

TEST_CASE("apg solves a plain quadratic") {
  const int n = 12;
  Rng rng(3);
  VectorXd c(n);
  for (int i = 0; i < n; ++i) c(i) = rng.normal();
  ApgProblem prob;
  prob.smooth_value = [&](const VectorXd& x) { return 0.5 * (x - c).squaredNorm(); };
  prob.smooth_grad = [&](const VectorXd& x, VectorXd& g) { g = x - c; };
  prob.apply_prox = [](VectorXd&, double) {};
  prob.penalty_value = [](const VectorXd&) { return 0.0; };

  const ApgResult res = apg_minimize(prob, VectorXd::Zero(n), {});
  CHECK((res.x - c).norm() <= 1e-6 * std::max(1.0, c.norm()));
}

TEST_CASE("apg matches the closed-form 1-D lasso") {
  MatrixXd A(1, 1);
  A << 1.0;
  VectorXd b(1);
  b << 2.0;
  const auto prob = lasso_problem(A, b, 0.5);
  const ApgResult res = apg_minimize(prob, VectorXd::Zero(1), {});
  CHECK(res.x(0) == doctest::Approx(1.5).epsilon(1e-6));
}

TEST_CASE("apg matches a coordinate-descent oracle on random lasso problems") {
  Rng rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 40, p = 20;
    MatrixXd A(n, p);
    VectorXd b(n);
    for (int i = 0; i < n; ++i) {
      b(i) = rng.normal();
      for (int j = 0; j < p; ++j) A(i, j) = rng.normal();
    }
    const double lam = rng.uniform(0.5, 4.0);
    const auto prob = lasso_problem(A, b, lam);

    ApgOptions opts;
    opts.max_iters = 2000;
    opts.tol = 1e-10;
    const ApgResult res = apg_minimize(prob, VectorXd::Zero(p), opts);
    const VectorXd oracle = cd_lasso(A, b, lam);
    const double obj_oracle = prob.smooth_value(oracle) + prob.penalty_value(oracle);
    CHECK(res.objective <= obj_oracle + 1e-6 * std::max(1.0, std::abs(obj_oracle)));
    CHECK(res.objective >= obj_oracle - 1e-6 * std::max(1.0, std::abs(obj_oracle)));
  }
}

TEST_CASE("apg never returns a worse point than the start") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const int p = 8;
    MatrixXd A(10, p);
    VectorXd b(10);
    for (int i = 0; i < 10; ++i) {
      b(i) = rng.normal();
      for (int j = 0; j < p; ++j) A(i, j) = rng.normal();
    }
    const double lam = rng.uniform(0.0, 2.0);
    const auto prob = lasso_problem(A, b, lam);
    VectorXd init(p);
    for (int j = 0; j < p; ++j) init(j) = rng.normal();
    const double f0 = prob.smooth_value(init) + prob.penalty_value(init);

    ApgOptions opts;
    opts.max_iters = 3;  // even truncated runs must not regress
    const ApgResult res = apg_minimize(prob, init, opts);
    CHECK(res.objective <= f0 + 1e-12);
  }
}

TEST_CASE("apg reports non-finite gradients") {
  ApgProblem prob;
  prob.smooth_value = [](const VectorXd&) { return 0.0; };
  prob.smooth_grad = [](const VectorXd&, VectorXd& g) {
    g.setConstant(std::numeric_limits<double>::quiet_NaN());
  };
  prob.apply_prox = [](VectorXd&, double) {};
  prob.penalty_value = [](const VectorXd&) { return 0.0; };
  CHECK_THROWS_AS(apg_minimize(prob, VectorXd::Zero(2), {}), std::runtime_error);
}
