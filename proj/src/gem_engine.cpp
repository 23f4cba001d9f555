#include "gem_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hermit/apg.hpp"
#include "hermit/expfamily.hpp"
#include "hermit/rng.hpp"

namespace hermit::detail {

namespace {

using Eigen::ArrayXd;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using BoolGrid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using BoolCol = Eigen::Array<bool, Eigen::Dynamic, 1>;

constexpr double kPiFloor = 1e-8;
constexpr double kDegenerate = 1e-8;
constexpr double kKktSlack = 1e-6;

double logsumexp_row(const Eigen::RowVectorXd& v) {
  const double mx = v.maxCoeff();
  if (!std::isfinite(mx)) return mx;
  return mx + std::log((v.array() - mx).exp().sum());
}

class Engine {
 public:
  Engine(const Dataset& data, const PenaltyConfig& pen, const FitConfig& cfg,
         const GemSpec& spec)
      : data_(data), pen_(pen), cfg_(cfg), spec_(spec) {
    if (cfg_.k < 1) throw std::invalid_argument("fit: k must be >= 1");
    if (cfg_.tol_obj <= 0 || cfg_.tol_param <= 0 || cfg_.tol_inner <= 0)
      throw std::invalid_argument("fit: tolerances must be positive");
    if (pen_.lambda < 0) throw std::invalid_argument("fit: lambda must be >= 0");
    n_ = data.n();
    d_ = data.d();
    m_ = data.m();
    k_ = cfg_.k;
    first_pen_ = (pen_.exempt_intercept && data.has_intercept) ? 1 : 0;

    Xj_.resize(m_);
    yj_.resize(m_);
    for (int j = 0; j < m_; ++j) {
      const auto& rows = data_.task_rows()[j];
      Xj_[j].resize(rows.size(), d_);
      yj_[j].resize(rows.size());
      for (size_t ii = 0; ii < rows.size(); ++ii) {
        Xj_[j].row(static_cast<int>(ii)) = data_.X.row(rows[ii]);
        yj_[j](static_cast<int>(ii)) = data_.Y(rows[ii], j);
      }
    }
  }

  GemOutput run() {
    initialize();

    update_beta();
    if (spec_.with_zeta) update_zeta();
    evaluate();
    report_.objective_trace.push_back(full_objective());
    report_.inner_iterations.push_back(inner_count_);

    double prev_nll = nll_bar_;
    snapshot();

    for (int t = 1; t <= cfg_.t_out; ++t) {
      inner_count_ = 0;
      e_step();
      if (spec_.update_mixing) {
        if (spec_.mixing == MixingMode::Pi)
          update_pi();
        else
          update_alpha();
      }
      update_beta();
      if (spec_.with_zeta) update_zeta();
      evaluate();
      report_.objective_trace.push_back(full_objective());
      report_.inner_iterations.push_back(inner_count_);
      report_.n_outer = t;

      const double rel_obj =
          std::abs(nll_bar_ - prev_nll) / std::max(1.0, std::abs(prev_nll));
      const double rel_param = snapshot_distance();
      prev_nll = nll_bar_;
      snapshot();

      bool want_stop = rel_obj < cfg_.tol_obj || rel_param < cfg_.tol_param;
      if (any_frozen_ && (want_stop || t % 5 == 0)) {
        if (full_kkt_unfreeze()) want_stop = false;
      }
      if (want_stop) {
        report_.converged = true;
        break;
      }
    }

    e_step();  // responsibilities at the final parameters

    GemOutput out;
    out.model.beta = beta_;
    out.model.families = data_.tasks;
    out.model.gamma = pen_.gamma;
    if (spec_.mixing == MixingMode::Gate) {
      out.alpha = alpha_;
      out.model.pi = log_prior_.array().exp().colwise().mean().transpose();
      normalize_pi(out.model.pi);
    } else {
      out.model.pi = pi_;
    }
    if (spec_.with_zeta) out.model.zeta = zeta_;
    out.rho = ResponsibilityMatrix{rho_};
    out.report = std::move(report_);
    return out;
  }

 private:
  void initialize() {
    Rng rng(cfg_.seed);

    rho_.setZero(n_, k_);
    if (spec_.init_rho) {
      if (spec_.init_rho->rows() != n_ || spec_.init_rho->cols() != k_)
        throw std::invalid_argument("init_rho shape mismatch");
      rho_ = *spec_.init_rho;
      for (int i = 0; i < n_; ++i) {
        const double s = rho_.row(i).sum();
        if (s <= 0) throw std::invalid_argument("init_rho row with zero mass");
        rho_.row(i) /= s;
      }
    } else {
      for (int i = 0; i < n_; ++i) rho_(i, rng.uniform_int(k_)) = 1.0;
    }

    // One shared jitter slice keeps component relabeling an exact symmetry.
    MatrixXd jitter(d_, m_);
    for (int j = 0; j < m_; ++j)
      for (int i = 0; i < d_; ++i) jitter(i, j) = 1e-5 * rng.normal();
    beta_.assign(k_, jitter);
    xbeta_.assign(k_, MatrixXd());
    for (int r = 0; r < k_; ++r) refresh_xbeta(r);

    pi_ = VectorXd::Constant(k_, 1.0 / k_);
    if (spec_.mixing == MixingMode::Gate) alpha_ = MatrixXd::Zero(d_, k_);
    if (spec_.with_zeta) zeta_.assign(k_, MatrixXd::Zero(n_, m_));

    degenerate_warned_.assign(k_, false);
    if (pen_.kind == PenaltyKind::Entrywise) {
      entry_streak_.assign(k_, Eigen::ArrayXXi::Zero(d_, m_));
      entry_frozen_.assign(k_, BoolGrid::Constant(d_, m_, false));
    } else {
      row_streak_.assign(k_, Eigen::ArrayXi::Zero(d_));
      row_frozen_.assign(k_, BoolCol::Constant(d_, false));
    }
    inner_count_ = 0;
  }

  double weight(int r) const {
    if (spec_.mixing == MixingMode::Gate) return 1.0;
    return pen_.gamma == 0.0 ? 1.0 : std::pow(pi_(r), pen_.gamma);
  }

  void refresh_xbeta(int r) { xbeta_[r] = data_.X * beta_[r]; }

  double nat_at(int r, int i, int j) const {
    double v = xbeta_[r](i, j);
    if (spec_.with_zeta) v += zeta_[r](i, j);
    return v;
  }

  // Log observed densities and log prior at the current parameters.
  void evaluate() {
    L_.setZero(n_, k_);
    for (int r = 0; r < k_; ++r) {
      for (int j = 0; j < m_; ++j) {
        const Family& fam = data_.tasks[j];
        for (int i : data_.task_rows()[j])
          L_(i, r) += log_density(fam, data_.Y(i, j), nat_at(r, i, j));
      }
    }
    if (spec_.mixing == MixingMode::Gate) {
      log_prior_ = data_.X * alpha_;
      for (int i = 0; i < n_; ++i)
        log_prior_.row(i).array() -= logsumexp_row(log_prior_.row(i));
    } else {
      log_prior_ = pi_.array().log().matrix().transpose().replicate(n_, 1);
    }
    double total = 0.0;
    for (int i = 0; i < n_; ++i)
      total += logsumexp_row(L_.row(i) + log_prior_.row(i));
    nll_bar_ = -total / n_;
  }

  double beta_penalty() const {
    if (pen_.lambda == 0.0) return 0.0;
    double v = 0.0;
    for (int r = 0; r < k_; ++r)
      v += weight(r) * block_norm(beta_[r], pen_.kind, first_pen_);
    return pen_.lambda * v;
  }

  double zeta_penalty() const {
    if (!spec_.with_zeta || spec_.lambda2_zeta == 0.0) return 0.0;
    ArrayXd sq = ArrayXd::Zero(n_);
    for (int r = 0; r < k_; ++r) sq += zeta_[r].array().square().rowwise().sum();
    return spec_.lambda2_zeta * sq.sqrt().sum();
  }

  double alpha_penalty() const {
    if (spec_.mixing != MixingMode::Gate || spec_.lambda2_alpha == 0.0) return 0.0;
    const int rows = d_ - first_pen_;
    if (rows <= 0) return 0.0;
    return spec_.lambda2_alpha * alpha_.bottomRows(rows).array().abs().sum();
  }

  double full_objective() const {
    return nll_bar_ + beta_penalty() + zeta_penalty() + alpha_penalty();
  }

  void e_step() {
    rho_.resize(n_, k_);
    for (int i = 0; i < n_; ++i) {
      Eigen::RowVectorXd row = L_.row(i) + log_prior_.row(i);
      row.array() -= logsumexp_row(row);
      rho_.row(i) = row.array().exp();
      rho_.row(i) /= rho_.row(i).sum();
    }
  }

  // Closed-form update, floored and kept only when it does not increase the
  // pi-dependent part of the expected penalized objective (the pi^gamma
  // weights can push the other way).
  void update_pi() {
    const VectorXd c = rho_.colwise().mean();
    for (int r = 0; r < k_; ++r) {
      if (c(r) < kDegenerate && !degenerate_warned_[r]) {
        report_.warnings.push_back("component " + std::to_string(r) +
                                   " degenerate; pi floored");
        degenerate_warned_[r] = true;
      }
    }
    VectorXd cand = c.cwiseMax(kPiFloor);
    cand /= cand.sum();

    ArrayXd bnorms(k_);
    for (int r = 0; r < k_; ++r) bnorms(r) = block_norm(beta_[r], pen_.kind, first_pen_);
    // gamma = 0 makes the penalty constant in pi, so it drops out of the guard
    auto q_pi = [&](const VectorXd& p) {
      double v = -(c.array() * p.array().log()).sum();
      if (pen_.lambda > 0.0 && pen_.gamma != 0.0)
        v += pen_.lambda * (p.array().pow(pen_.gamma) * bnorms).sum();
      return v;
    };
    if (q_pi(cand) <= q_pi(pi_)) pi_ = cand;
  }

  void update_alpha() {
    const double lam = spec_.lambda2_alpha;
    MatrixXd xa_buf(n_, k_), probs(n_, k_), grad_mat(d_, k_);

    ApgProblem prob;
    prob.smooth_value = [&](const VectorXd& v) {
      const Eigen::Map<const MatrixXd> A(v.data(), d_, k_);
      xa_buf.noalias() = data_.X * A;
      double s = 0.0;
      for (int i = 0; i < n_; ++i) {
        s += logsumexp_row(xa_buf.row(i));
        s -= rho_.row(i).dot(xa_buf.row(i));
      }
      return s / n_;
    };
    prob.smooth_grad = [&](const VectorXd& v, VectorXd& g) {
      const Eigen::Map<const MatrixXd> A(v.data(), d_, k_);
      xa_buf.noalias() = data_.X * A;
      for (int i = 0; i < n_; ++i) {
        const double lse = logsumexp_row(xa_buf.row(i));
        probs.row(i) = (xa_buf.row(i).array() - lse).exp();
      }
      grad_mat.noalias() = data_.X.transpose() * (probs - rho_);
      grad_mat /= n_;
      g = Eigen::Map<VectorXd>(grad_mat.data(), d_ * k_);
    };
    prob.apply_prox = [&](VectorXd& v, double t) {
      Eigen::Map<MatrixXd> A(v.data(), d_, k_);
      const double thr = t * lam;
      if (thr <= 0.0) return;
      for (int r = 0; r < k_; ++r)
        for (int i = first_pen_; i < d_; ++i) {
          const double a = A(i, r);
          A(i, r) = a > thr ? a - thr : (a < -thr ? a + thr : 0.0);
        }
    };
    prob.penalty_value = [&](const VectorXd& v) {
      if (lam == 0.0) return 0.0;
      const Eigen::Map<const MatrixXd> A(v.data(), d_, k_);
      const int rows = d_ - first_pen_;
      return rows > 0 ? lam * A.bottomRows(rows).array().abs().sum() : 0.0;
    };

    VectorXd init = Eigen::Map<VectorXd>(alpha_.data(), d_ * k_);
    ApgOptions opts;
    opts.max_iters = cfg_.t_in;
    opts.tol = cfg_.tol_inner;
    const ApgResult res = apg_minimize(prob, std::move(init), opts);
    alpha_ = Eigen::Map<const MatrixXd>(res.x.data(), d_, k_);
    inner_count_ += res.iterations;
  }

  void update_beta() {
    for (int r = 0; r < k_; ++r) {
      if (pen_.kind == PenaltyKind::Entrywise)
        update_beta_entrywise(r);
      else
        update_beta_rowgroup(r);
      refresh_xbeta(r);
    }
    record_zero_streaks();
  }

  void update_beta_entrywise(int r) {
    const double lam_w = pen_.lambda * weight(r);
    for (int j = 0; j < m_; ++j) {
      const auto& rows = data_.task_rows()[j];
      const int nj = static_cast<int>(rows.size());
      if (nj == 0) {
        if (lam_w > 0.0 && d_ > first_pen_)
          beta_[r].col(j).tail(d_ - first_pen_).setZero();
        continue;
      }

      std::vector<int> act;
      act.reserve(d_);
      for (int i = 0; i < d_; ++i)
        if (i < first_pen_ || !entry_frozen_[r](i, j)) act.push_back(i);
      const int na = static_cast<int>(act.size());
      if (na == 0) continue;

      MatrixXd Xa(nj, na);
      for (int p = 0; p < na; ++p) Xa.col(p) = Xj_[j].col(act[p]);
      VectorXd w(nj), off;
      for (int ii = 0; ii < nj; ++ii) w(ii) = rho_(rows[ii], r);
      if (spec_.with_zeta) {
        off.resize(nj);
        for (int ii = 0; ii < nj; ++ii) off(ii) = zeta_[r](rows[ii], j);
      }
      const VectorXd& y = yj_[j];
      const Family fam = data_.tasks[j];
      const double inv_na = 1.0 / (static_cast<double>(n_) * fam.dispersion);

      VectorXd eta(nj), tvec(nj);
      ApgProblem prob;
      prob.smooth_value = [&](const VectorXd& v) {
        eta.noalias() = Xa * v;
        if (off.size()) eta += off;
        double s = 0.0;
        for (int ii = 0; ii < nj; ++ii)
          s += w(ii) * (cumulant(fam, eta(ii)) - y(ii) * eta(ii));
        return s * inv_na;
      };
      prob.smooth_grad = [&](const VectorXd& v, VectorXd& g) {
        eta.noalias() = Xa * v;
        if (off.size()) eta += off;
        for (int ii = 0; ii < nj; ++ii)
          tvec(ii) = w(ii) * (mean(fam, eta(ii)) - y(ii));
        g.noalias() = Xa.transpose() * tvec;
        g *= inv_na;
      };
      prob.apply_prox = [&](VectorXd& v, double t) {
        const double thr = t * lam_w;
        if (thr <= 0.0) return;
        for (int p = 0; p < na; ++p) {
          if (act[p] < first_pen_) continue;
          const double a = v(p);
          v(p) = a > thr ? a - thr : (a < -thr ? a + thr : 0.0);
        }
      };
      prob.penalty_value = [&](const VectorXd& v) {
        if (lam_w == 0.0) return 0.0;
        double s = 0.0;
        for (int p = 0; p < na; ++p)
          if (act[p] >= first_pen_) s += std::abs(v(p));
        return lam_w * s;
      };

      VectorXd init(na);
      for (int p = 0; p < na; ++p) init(p) = beta_[r](act[p], j);
      ApgOptions opts;
      opts.max_iters = cfg_.t_in;
      opts.tol = cfg_.tol_inner;
      const ApgResult res = apg_minimize(prob, std::move(init), opts);
      for (int p = 0; p < na; ++p) beta_[r](act[p], j) = res.x(p);
      inner_count_ += res.iterations;
    }
  }

  void update_beta_rowgroup(int r) {
    const double lam_w = pen_.lambda * weight(r);

    std::vector<int> act;
    act.reserve(d_);
    for (int i = 0; i < d_; ++i)
      if (i < first_pen_ || !row_frozen_[r](i)) act.push_back(i);
    const int na = static_cast<int>(act.size());
    if (na == 0) return;

    MatrixXd Xa(n_, na);
    for (int p = 0; p < na; ++p) Xa.col(p) = data_.X.col(act[p]);
    ArrayXd thr_rows(na);
    for (int p = 0; p < na; ++p) thr_rows(p) = act[p] >= first_pen_ ? 1.0 : 0.0;

    MatrixXd eta(n_, m_), gmat(n_, m_), grad_b(na, m_);
    const double inv_n = 1.0 / n_;

    ApgProblem prob;
    prob.smooth_value = [&](const VectorXd& v) {
      const Eigen::Map<const MatrixXd> B(v.data(), na, m_);
      eta.noalias() = Xa * B;
      if (spec_.with_zeta) eta += zeta_[r];
      double s = 0.0;
      for (int j = 0; j < m_; ++j) {
        const Family& fam = data_.tasks[j];
        double sj = 0.0;
        for (int i : data_.task_rows()[j])
          sj += rho_(i, r) * (cumulant(fam, eta(i, j)) - data_.Y(i, j) * eta(i, j));
        s += sj / fam.dispersion;
      }
      return s * inv_n;
    };
    prob.smooth_grad = [&](const VectorXd& v, VectorXd& g) {
      const Eigen::Map<const MatrixXd> B(v.data(), na, m_);
      eta.noalias() = Xa * B;
      if (spec_.with_zeta) eta += zeta_[r];
      gmat.setZero();
      for (int j = 0; j < m_; ++j) {
        const Family& fam = data_.tasks[j];
        for (int i : data_.task_rows()[j])
          gmat(i, j) =
              rho_(i, r) * (mean(fam, eta(i, j)) - data_.Y(i, j)) / fam.dispersion;
      }
      grad_b.noalias() = Xa.transpose() * gmat;
      grad_b *= inv_n;
      g = Eigen::Map<VectorXd>(grad_b.data(), na * m_);
    };
    prob.apply_prox = [&](VectorXd& v, double t) {
      if (lam_w <= 0.0) return;
      Eigen::Map<MatrixXd> B(v.data(), na, m_);
      prox_inplace(B, thr_rows * (t * lam_w), PenaltyKind::RowGroup);
    };
    prob.penalty_value = [&](const VectorXd& v) {
      if (lam_w == 0.0) return 0.0;
      const Eigen::Map<const MatrixXd> B(v.data(), na, m_);
      double s = 0.0;
      for (int p = 0; p < na; ++p)
        if (act[p] >= first_pen_) s += B.row(p).norm();
      return lam_w * s;
    };

    MatrixXd B0(na, m_);
    for (int p = 0; p < na; ++p) B0.row(p) = beta_[r].row(act[p]);
    VectorXd init = Eigen::Map<VectorXd>(B0.data(), na * m_);
    ApgOptions opts;
    opts.max_iters = cfg_.t_in;
    opts.tol = cfg_.tol_inner;
    const ApgResult res = apg_minimize(prob, std::move(init), opts);
    const Eigen::Map<const MatrixXd> Bout(res.x.data(), na, m_);
    for (int p = 0; p < na; ++p) beta_[r].row(act[p]) = Bout.row(p);
    inner_count_ += res.iterations;
  }

  // Joint mean-shift update: one APG over all slices with the sample-wise
  // group prox over each length-(m*k) slice.
  void update_zeta() {
    const double lam2 = spec_.lambda2_zeta;
    const int slice = n_ * m_;
    const double inv_n = 1.0 / n_;

    auto slice_map = [&](VectorXd& v, int r) {
      return Eigen::Map<MatrixXd>(v.data() + r * slice, n_, m_);
    };
    auto slice_cmap = [&](const VectorXd& v, int r) {
      return Eigen::Map<const MatrixXd>(v.data() + r * slice, n_, m_);
    };

    ApgProblem prob;
    prob.smooth_value = [&](const VectorXd& v) {
      double s = 0.0;
      for (int r = 0; r < k_; ++r) {
        const auto Z = slice_cmap(v, r);
        for (int j = 0; j < m_; ++j) {
          const Family& fam = data_.tasks[j];
          double sj = 0.0;
          for (int i : data_.task_rows()[j]) {
            const double nat = xbeta_[r](i, j) + Z(i, j);
            sj += rho_(i, r) * (cumulant(fam, nat) - data_.Y(i, j) * nat);
          }
          s += sj / fam.dispersion;
        }
      }
      return s * inv_n;
    };
    prob.smooth_grad = [&](const VectorXd& v, VectorXd& g) {
      g.setZero(v.size());
      for (int r = 0; r < k_; ++r) {
        const auto Z = slice_cmap(v, r);
        Eigen::Map<MatrixXd> G(g.data() + r * slice, n_, m_);
        for (int j = 0; j < m_; ++j) {
          const Family& fam = data_.tasks[j];
          for (int i : data_.task_rows()[j]) {
            const double nat = xbeta_[r](i, j) + Z(i, j);
            G(i, j) = rho_(i, r) * (mean(fam, nat) - data_.Y(i, j)) /
                      fam.dispersion * inv_n;
          }
        }
      }
    };
    prob.apply_prox = [&](VectorXd& v, double t) {
      const double thr = t * lam2;
      if (thr <= 0.0) return;
      ArrayXd sq = ArrayXd::Zero(n_);
      for (int r = 0; r < k_; ++r)
        sq += slice_cmap(v, r).array().square().rowwise().sum();
      const ArrayXd norms = sq.sqrt();
      for (int r = 0; r < k_; ++r) {
        auto Z = slice_map(v, r);
        for (int i = 0; i < n_; ++i) {
          if (norms(i) <= thr)
            Z.row(i).setZero();
          else
            Z.row(i) *= 1.0 - thr / norms(i);
        }
      }
    };
    prob.penalty_value = [&](const VectorXd& v) {
      ArrayXd sq = ArrayXd::Zero(n_);
      for (int r = 0; r < k_; ++r)
        sq += slice_cmap(v, r).array().square().rowwise().sum();
      return lam2 * sq.sqrt().sum();
    };

    VectorXd init(k_ * slice);
    for (int r = 0; r < k_; ++r) slice_map(init, r) = zeta_[r];
    ApgOptions opts;
    opts.max_iters = cfg_.t_in;
    opts.tol = cfg_.tol_inner;
    const ApgResult res = apg_minimize(prob, std::move(init), opts);
    for (int r = 0; r < k_; ++r) zeta_[r] = slice_cmap(res.x, r);
    inner_count_ += res.iterations;
  }

  void record_zero_streaks() {
    if (!cfg_.use_active_set || pen_.lambda <= 0.0) return;
    any_frozen_ = false;
    for (int r = 0; r < k_; ++r) {
      if (pen_.kind == PenaltyKind::Entrywise) {
        for (int j = 0; j < m_; ++j)
          for (int i = first_pen_; i < d_; ++i) {
            if (beta_[r](i, j) == 0.0)
              ++entry_streak_[r](i, j);
            else
              entry_streak_[r](i, j) = 0;
            entry_frozen_[r](i, j) = entry_streak_[r](i, j) >= 2;
            any_frozen_ = any_frozen_ || entry_frozen_[r](i, j);
          }
      } else {
        for (int i = first_pen_; i < d_; ++i) {
          if (beta_[r].row(i).norm() == 0.0)
            ++row_streak_[r](i);
          else
            row_streak_[r](i) = 0;
          row_frozen_[r](i) = row_streak_[r](i) >= 2;
          any_frozen_ = any_frozen_ || row_frozen_[r](i);
        }
      }
    }
  }

  MatrixXd full_smooth_grad(int r) const {
    MatrixXd gmat = MatrixXd::Zero(n_, m_);
    for (int j = 0; j < m_; ++j) {
      const Family& fam = data_.tasks[j];
      for (int i : data_.task_rows()[j])
        gmat(i, j) =
            rho_(i, r) * (mean(fam, nat_at(r, i, j)) - data_.Y(i, j)) / fam.dispersion;
    }
    return (data_.X.transpose() * gmat) / n_;
  }

  // Re-check frozen coordinates against the subgradient optimality bound;
  // returns true when anything re-enters the problem.
  bool full_kkt_unfreeze() {
    bool unfroze = false;
    for (int r = 0; r < k_; ++r) {
      const double thr = pen_.lambda * weight(r) * (1.0 + kKktSlack) + 1e-12;
      const MatrixXd G = full_smooth_grad(r);
      if (pen_.kind == PenaltyKind::Entrywise) {
        for (int j = 0; j < m_; ++j)
          for (int i = first_pen_; i < d_; ++i)
            if (entry_frozen_[r](i, j) && std::abs(G(i, j)) > thr) {
              entry_frozen_[r](i, j) = false;
              entry_streak_[r](i, j) = 0;
              unfroze = true;
            }
      } else {
        for (int i = first_pen_; i < d_; ++i)
          if (row_frozen_[r](i) && G.row(i).norm() > thr) {
            row_frozen_[r](i) = false;
            row_streak_[r](i) = 0;
            unfroze = true;
          }
      }
    }
    return unfroze;
  }

  void snapshot() {
    snap_beta_ = beta_;
    snap_pi_ = pi_;
    snap_alpha_ = alpha_;
    snap_zeta_ = zeta_;
  }

  double snapshot_distance() const {
    double diff = 0.0, scale = 1.0;
    auto upd = [&](double dv, double ov) {
      diff = std::max(diff, std::abs(dv));
      scale = std::max(scale, std::abs(ov));
    };
    for (int r = 0; r < k_; ++r)
      for (int j = 0; j < m_; ++j)
        for (int i = 0; i < d_; ++i)
          upd(beta_[r](i, j) - snap_beta_[r](i, j), snap_beta_[r](i, j));
    if (spec_.mixing == MixingMode::Gate) {
      for (int r = 0; r < k_; ++r)
        for (int i = 0; i < d_; ++i) upd(alpha_(i, r) - snap_alpha_(i, r), snap_alpha_(i, r));
    } else {
      for (int r = 0; r < k_; ++r) upd(pi_(r) - snap_pi_(r), snap_pi_(r));
    }
    for (int r = 0; r < static_cast<int>(zeta_.size()); ++r)
      for (int j = 0; j < m_; ++j)
        for (int i = 0; i < n_; ++i)
          upd(zeta_[r](i, j) - snap_zeta_[r](i, j), snap_zeta_[r](i, j));
    return diff / scale;
  }

  const Dataset& data_;
  PenaltyConfig pen_;
  FitConfig cfg_;
  GemSpec spec_;
  int n_ = 0, d_ = 0, m_ = 0, k_ = 0, first_pen_ = 0;

  std::vector<MatrixXd> Xj_;
  std::vector<VectorXd> yj_;

  std::vector<MatrixXd> beta_, xbeta_, zeta_;
  VectorXd pi_;
  MatrixXd alpha_;
  MatrixXd rho_;
  MatrixXd L_, log_prior_;
  double nll_bar_ = 0.0;

  std::vector<Eigen::ArrayXXi> entry_streak_;
  std::vector<BoolGrid> entry_frozen_;
  std::vector<Eigen::ArrayXi> row_streak_;
  std::vector<BoolCol> row_frozen_;
  bool any_frozen_ = false;

  std::vector<MatrixXd> snap_beta_, snap_zeta_;
  VectorXd snap_pi_;
  MatrixXd snap_alpha_;

  FitReport report_;
  std::vector<bool> degenerate_warned_;
  int inner_count_ = 0;
};

}  // namespace

GemOutput gem_fit(const Dataset& data, const PenaltyConfig& pen, const FitConfig& cfg,
                  const GemSpec& spec) {
  Engine engine(data, pen, cfg, spec);
  return engine.run();
}

}  // namespace hermit::detail
