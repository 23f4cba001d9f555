#include "hermit/apg.hpp"

#include <cmath>
#include <stdexcept>

namespace hermit {

namespace {

void check_finite(const Eigen::VectorXd& g) {
  if (!g.allFinite())
    throw std::runtime_error("apg_minimize: non-finite gradient encountered");
}

// Two-point Barzilai-Borwein estimate of 1/L around x0.
double bb_initial_step(const ApgProblem& prob, const Eigen::VectorXd& x0,
                       const Eigen::VectorXd& g0) {
  const double gnorm = g0.norm();
  if (gnorm == 0.0) return 1.0;
  const double delta = 1e-4 * std::max(1.0, x0.norm());
  const Eigen::VectorXd x1 = x0 - (delta / gnorm) * g0;
  Eigen::VectorXd g1(x0.size());
  prob.smooth_grad(x1, g1);
  check_finite(g1);
  const Eigen::VectorXd s = x1 - x0;
  const Eigen::VectorXd y = g1 - g0;
  const double sy = s.dot(y);
  if (sy <= 0.0) return 1.0;
  const double step = s.squaredNorm() / sy;
  return std::clamp(step, 1e-12, 1e12);
}

}  // namespace

ApgResult apg_minimize(const ApgProblem& prob, Eigen::VectorXd init,
                       const ApgOptions& opts) {
  ApgResult res;
  if (init.size() == 0) {
    res.x = init;
    res.objective = prob.smooth_value(init) + prob.penalty_value(init);
    res.converged = true;
    return res;
  }

  Eigen::VectorXd x = std::move(init);
  Eigen::VectorXd y = x;
  Eigen::VectorXd g(x.size()), z(x.size()), dz(x.size());

  Eigen::VectorXd best_x = x;
  double best_f = prob.smooth_value(x) + prob.penalty_value(x);

  prob.smooth_grad(x, g);
  check_finite(g);
  double step = opts.init_step > 0.0 ? opts.init_step : bb_initial_step(prob, x, g);
  double t_mom = 1.0;

  int iter = 0;
  bool converged = false;
  for (; iter < opts.max_iters; ++iter) {
    if (iter > 0) {
      prob.smooth_grad(y, g);
      check_finite(g);
    }
    const double fy = prob.smooth_value(y);

    double fz = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 80; ++bt) {
      z = y - step * g;
      prob.apply_prox(z, step);
      dz = z - y;
      fz = prob.smooth_value(z);
      const double quad = fy + g.dot(dz) + dz.squaredNorm() / (2.0 * step);
      if (fz <= quad + 1e-12 * std::max(1.0, std::abs(fy))) {
        accepted = true;
        break;
      }
      step *= opts.shrink;
    }
    if (!accepted) break;  // step underflow; return best seen

    const double obj_z = fz + prob.penalty_value(z);
    if (obj_z < best_f) {
      best_f = obj_z;
      best_x = z;
    }

    const Eigen::VectorXd x_diff = z - x;
    const double step_norm = x_diff.norm();

    // gradient-based adaptive restart
    if ((y - z).dot(x_diff) > 0.0) {
      t_mom = 1.0;
      y = z;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_mom * t_mom));
      y = z + ((t_mom - 1.0) / t_next) * x_diff;
      t_mom = t_next;
    }
    x = z;
    res.step = step;
    step *= opts.grow;

    if (step_norm <= opts.tol * std::max(1.0, x.norm())) {
      converged = true;
      ++iter;
      break;
    }
  }

  res.x = std::move(best_x);
  res.objective = best_f;
  res.iterations = iter;
  res.converged = converged;
  return res;
}

}  // namespace hermit
