#pragma once

#include <Eigen/Dense>
#include <functional>

namespace hermit {

struct ApgOptions {
  int max_iters = 200;
  double tol = 1e-6;       // relative l2 step tolerance
  double init_step = 0.0;  // <= 0: Barzilai-Borwein probe
  double grow = 1.1;
  double shrink = 0.5;
};

// Composite problem min_x f(x) + R(x), f smooth convex, R with a cheap prox.
struct ApgProblem {
  std::function<double(const Eigen::VectorXd&)> smooth_value;
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> smooth_grad;
  std::function<void(Eigen::VectorXd&, double)> apply_prox;  // x <- prox_{t R}(x)
  std::function<double(const Eigen::VectorXd&)> penalty_value;
};

struct ApgResult {
  Eigen::VectorXd x;
  double objective = 0.0;  // f + R at x
  int iterations = 0;
  bool converged = false;
  double step = 0.0;  // last accepted step size
};

// Accelerated proximal gradient with backtracking and adaptive restart.  The
// returned point never has a larger composite objective than `init`.
ApgResult apg_minimize(const ApgProblem& prob, Eigen::VectorXd init,
                       const ApgOptions& opts);

}  // namespace hermit
