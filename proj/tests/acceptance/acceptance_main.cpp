// Acceptance suite: one checked criterion per line, nonzero exit when any
// fails.  Run a single criterion with --criterion N.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hermit/datagen.hpp"
#include "hermit/metrics.hpp"
#include "hermit/moe.hpp"
#include "hermit/penalty.hpp"
#include "hermit/protocols.hpp"
#include "hermit/rng.hpp"
#include "hermit/solver.hpp"
#include "hermit/tune.hpp"

using namespace hermit;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return std::string(buf);
}

double get(const std::map<std::string, Aggregate>& agg, const std::string& key) {
  const auto it = agg.find(key);
  return it == agg.end() ? std::numeric_limits<double>::quiet_NaN() : it->second.mean;
}

// ---------------------------------------------------------------- criterion 1

Outcome criterion_gem_monotonicity() {
  double worst = -std::numeric_limits<double>::infinity();
  int violations = 0;
  for (int trial = 0; trial < 50; ++trial) {
    SynthSpec sp;
    sp.n = 60 + 15 * (trial % 4);
    sp.d = 6 + (trial % 3) * 3;
    sp.m_gaussian = 1 + trial % 2;
    sp.m_bernoulli = 1 + (trial / 2) % 2;
    sp.m_poisson = trial % 3 == 0 ? 1 : 0;
    sp.k_true = 1 + trial % 3;
    sp.sparsity = 1 + trial % 2;
    sp.missing_rate = trial % 2 ? 0.2 : 0.0;
    sp.coef_range = {1.0, 2.5};
    sp.seed = 9000 + trial;
    const SynthData data = generate(sp);

    PenaltyConfig pen;
    pen.kind = trial % 2 ? PenaltyKind::RowGroup : PenaltyKind::Entrywise;
    pen.lambda = 0.01 * (1 + trial % 5);
    pen.gamma = (trial % 3 == 0) ? 0.5 : 1.0;
    FitConfig cfg;
    cfg.k = 1 + (trial + 1) % 3;
    cfg.seed = 17 * trial + 1;
    const FitResult res = fit(data.data, pen, cfg);

    const auto& trace = res.report.objective_trace;
    for (size_t t = 1; t < trace.size(); ++t) {
      const double rise = trace[t] - trace[t - 1];
      worst = std::max(worst, rise);
      if (rise > 1e-8) ++violations;
    }
  }
  Outcome out;
  out.pass = violations == 0;
  out.detail = fmt("50 fits, worst objective rise %.3e (slack 1e-8)", worst);
  return out;
}

// ---------------------------------------------------------------- criterion 2

Outcome criterion_gradients() {
  Rng rng(404);
  auto fams = std::vector<Family>{{FamilyKind::Gaussian, 1.0},
                                  {FamilyKind::Bernoulli, 1.0},
                                  {FamilyKind::Poisson, 1.0}};
  SynthSpec sp;
  sp.n = 40;
  sp.d = 5;
  sp.m_gaussian = 1;
  sp.m_bernoulli = 1;
  sp.m_poisson = 1;
  sp.k_true = 2;
  sp.sparsity = 1;
  sp.missing_rate = 0.2;
  sp.seed = 777;
  const SynthData synth = generate(sp);
  const Dataset& data = synth.data;

  const double h = 1e-6;
  double worst_beta = 0.0, worst_zeta = 0.0, worst_alpha = 0.0;

  for (int point = 0; point < 100; ++point) {
    VectorXd rho(data.n());
    for (int i = 0; i < data.n(); ++i) rho(i) = rng.uniform(0.05, 1.0);
    MatrixXd beta(data.d(), data.m());
    for (int i = 0; i < beta.size(); ++i)
      beta(i % data.d(), i / data.d()) = 0.3 * rng.normal();
    MatrixXd zeta(data.n(), data.m());
    for (int i = 0; i < data.n(); ++i)
      for (int j = 0; j < data.m(); ++j) zeta(i, j) = 0.2 * rng.normal();

    // beta gradient
    const MatrixXd grad_b = mstep_smooth_grad(data, rho, beta, &zeta);
    for (int i = 0; i < data.d(); ++i)
      for (int j = 0; j < data.m(); ++j) {
        MatrixXd up = beta, dn = beta;
        up(i, j) += h;
        dn(i, j) -= h;
        const double fd = (mstep_smooth_value(data, rho, up, &zeta) -
                           mstep_smooth_value(data, rho, dn, &zeta)) /
                          (2.0 * h);
        worst_beta = std::max(
            worst_beta, std::abs(grad_b(i, j) - fd) / std::max(1.0, std::abs(fd)));
      }

    // mean-shift gradient: d/d zeta_ij of the same smooth part
    for (int probe = 0; probe < 6; ++probe) {
      const int i = rng.uniform_int(data.n());
      const int j = rng.uniform_int(data.m());
      const double analytic =
          data.observed(i, j)
              ? rho(i) *
                    (mean(data.tasks[j], data.X.row(i).dot(beta.col(j)) + zeta(i, j)) -
                     data.Y(i, j)) /
                    data.tasks[j].dispersion / data.n()
              : 0.0;
      MatrixXd up = zeta, dn = zeta;
      up(i, j) += h;
      dn(i, j) -= h;
      const double fd = (mstep_smooth_value(data, rho, beta, &up) -
                         mstep_smooth_value(data, rho, beta, &dn)) /
                        (2.0 * h);
      worst_zeta = std::max(worst_zeta,
                            std::abs(analytic - fd) / std::max(1.0, std::abs(fd)));
    }

    // gate gradient
    MatrixXd alpha(data.d(), 2), rho2(data.n(), 2);
    for (int i = 0; i < alpha.size(); ++i)
      alpha(i % data.d(), i / data.d()) = 0.4 * rng.normal();
    for (int i = 0; i < data.n(); ++i) {
      rho2(i, 0) = rng.uniform(0.05, 0.95);
      rho2(i, 1) = 1.0 - rho2(i, 0);
    }
    const MatrixXd grad_a = gate_nll_grad(alpha, data.X, rho2);
    for (int probe = 0; probe < 6; ++probe) {
      const int i = rng.uniform_int(data.d());
      const int r = rng.uniform_int(2);
      MatrixXd up = alpha, dn = alpha;
      up(i, r) += h;
      dn(i, r) -= h;
      const double fd =
          (gate_nll(up, data.X, rho2) - gate_nll(dn, data.X, rho2)) / (2.0 * h);
      worst_alpha = std::max(
          worst_alpha, std::abs(grad_a(i, r) - fd) / std::max(1.0, std::abs(fd)));
    }
  }

  Outcome out;
  out.pass = worst_beta < 1e-5 && worst_zeta < 1e-5 && worst_alpha < 1e-5;
  out.detail = fmt("max rel err: beta %.2e, zeta %.2e, alpha %.2e (tol 1e-5)",
                   worst_beta, worst_zeta, worst_alpha);
  return out;
}

// ---------------------------------------------------------------- criterion 3

Outcome criterion_prox() {
  Rng rng(505);
  double worst = 0.0;

  // hand cases must be exact
  MatrixXd z1(1, 1);
  z1 << 2.0;
  bool hand = std::abs(prox(z1, 0.5, PenaltyKind::Entrywise)(0, 0) - 1.5) == 0.0;
  z1 << -0.3;
  hand = hand && prox(z1, 0.5, PenaltyKind::Entrywise)(0, 0) == 0.0;
  MatrixXd zr(1, 2);
  zr << 3.0, 4.0;
  const MatrixXd pr = prox(zr, 2.5, PenaltyKind::RowGroup);
  hand = hand && std::abs(pr(0, 0) - 1.5) < 1e-15 && std::abs(pr(0, 1) - 2.0) < 1e-15;

  for (int trial = 0; trial < 200; ++trial) {
    if (trial % 2 == 0) {
      const double z = rng.uniform(-3.0, 3.0);
      const double t = rng.uniform(0.0, 2.0);
      MatrixXd zm(1, 1);
      zm << z;
      const double got = prox(zm, t, PenaltyKind::Entrywise)(0, 0);
      double best = 0.0, best_obj = std::numeric_limits<double>::infinity();
      for (double b = -4.0; b <= 4.0; b += 1e-4) {
        const double obj = 0.5 * (b - z) * (b - z) + t * std::abs(b);
        if (obj < best_obj) {
          best_obj = obj;
          best = b;
        }
      }
      worst = std::max(worst, std::abs(got - best));
    } else {
      MatrixXd z(1, 4);
      for (int j = 0; j < 4; ++j) z(0, j) = rng.uniform(-2.0, 2.0);
      const double t = rng.uniform(0.0, 2.0);
      const MatrixXd got = prox(z, t, PenaltyKind::RowGroup);
      const double norm = z.norm();
      double best_c = 0.0, best_obj = std::numeric_limits<double>::infinity();
      for (double c = 0.0; c <= 1.0; c += 1e-5) {
        const double obj = 0.5 * (1.0 - c) * (1.0 - c) * norm * norm + t * c * norm;
        if (obj < best_obj) {
          best_obj = obj;
          best_c = c;
        }
      }
      worst = std::max(worst, (got - best_c * z).cwiseAbs().maxCoeff());
    }
  }

  Outcome out;
  out.pass = hand && worst <= 2e-4;
  out.detail = fmt("hand cases %s, 200 grid oracles max dev %.2e (tol 2e-4)",
                   hand ? "exact" : "WRONG", worst);
  return out;
}

// ---------------------------------------------------------------- criterion 4

Outcome criterion_table1() {
  ProtocolOptions opt;
  opt.replications = 20;
  opt.keep_fraction = 0.2;
  opt.seed = 1;
  const auto result = run_protocol("table1", opt);
  const auto agg = aggregate_best(result, opt.keep_fraction);

  const double mix_nmse = get(agg, "mix.nmse");
  const double mix_aauc = get(agg, "mix.aauc");
  const double lasso_nmse = get(agg, "lasso.nmse");
  const double lasso_aauc = get(agg, "lasso.aauc");

  Outcome out;
  out.pass = mix_nmse < 0.25 && mix_aauc > 0.90 && lasso_nmse > 0.5 &&
             lasso_aauc < 0.82;
  out.detail = fmt("mix nmse %.4f (<0.25) aauc %.4f (>0.90); "
                   "lasso nmse %.4f (>0.5) aauc %.4f (<0.82)",
                   mix_nmse, mix_aauc, lasso_nmse, lasso_aauc);
  return out;
}

// ---------------------------------------------------------------- criterion 5

Outcome criterion_fig1() {
  ProtocolOptions opt;
  opt.replications = 10;
  opt.keep_fraction = 0.2;
  opt.seed = 2;
  const auto result = run_protocol("fig1", opt);
  const auto agg = aggregate_best(result, opt.keep_fraction);

  bool ordering = true;
  std::string chain;
  for (const char* tag : {"m0", "m20"}) {
    const double single = get(agg, std::string("single_") + tag + ".nmi");
    const double sep = get(agg, std::string("sep_") + tag + ".nmi");
    const double mix = get(agg, std::string("mix_") + tag + ".nmi");
    const double mixgs = get(agg, std::string("mixgs_") + tag + ".nmi");
    ordering = ordering && (mixgs >= mix - 0.02) && (mix >= sep - 0.02) &&
               (sep >= single - 0.02);
    chain += fmt("[%s nmi: gs %.3f mix %.3f sep %.3f single %.3f] ", tag, mixgs,
                 mix, sep, single);
  }
  const double gs_nmi_m0 = get(agg, "mixgs_m0.nmi");
  const double gs_auc_m0 = get(agg, "mixgs_m0.fsauc");
  const double gs_auc_m20 = get(agg, "mixgs_m20.fsauc");

  Outcome out;
  out.pass = ordering && gs_nmi_m0 > 0.8 && gs_auc_m0 > 0.9 && gs_auc_m20 > 0.9;
  out.detail = chain + fmt("gs nmi@0 %.3f (>0.8) fsauc %.3f/%.3f (>0.9)",
                           gs_nmi_m0, gs_auc_m0, gs_auc_m20);
  return out;
}

// ---------------------------------------------------------------- criterion 6

Outcome criterion_table4() {
  ProtocolOptions opt;
  opt.replications = 5;
  opt.keep_fraction = 0.2;
  opt.seed = 3;
  const auto result = run_protocol("table4", opt);
  const auto agg = aggregate_best(result, opt.keep_fraction);

  const double rob5 = get(agg, "robust_c5.nmse_gaussian");
  const double non5 = get(agg, "nonrobust_c5.nmse_gaussian");
  const double rob0 = get(agg, "robust_c0.nmse_gaussian");
  const double non0 = get(agg, "nonrobust_c0.nmse_gaussian");

  Outcome out;
  out.pass = rob5 < 0.15 && non5 > 0.5 && std::abs(rob0 - non0) <= 0.02;
  out.detail = fmt("5%%: robust %.4f (<0.15) vs plain %.4f (>0.5); "
                   "0%%: |%.4f - %.4f| = %.4f (<=0.02)",
                   rob5, non5, rob0, non0, std::abs(rob0 - non0));
  return out;
}

// ---------------------------------------------------------------- criterion 7

Outcome criterion_scores() {
  ProtocolOptions opt;
  opt.replications = 20;
  opt.seed = 4;
  const auto result = run_protocol("table2-scores", opt);
  int separated = 0;
  for (const auto& run : result.runs)
    separated += run.metrics.at("scores.separated") > 0.5;
  Outcome out;
  out.pass = separated >= 18;
  out.detail = fmt("concordant/anomaly separation in %d/20 runs (need >= 18)",
                   separated);
  return out;
}

// ---------------------------------------------------------------- criterion 8

Outcome criterion_clusters() {
  ProtocolOptions opt;
  opt.replications = 5;
  opt.seed = 5;
  const auto result = run_protocol("table3-clusters", opt);
  const auto agg = aggregate_best(result, 1.0);

  const double m2 = get(agg, "clusters.g2_margin");
  const double m3 = get(agg, "clusters.g3_margin");
  const double m4 = get(agg, "clusters.g4_margin");
  int recovered = 0;
  for (const auto& run : result.runs)
    recovered += run.metrics.at("clusters.recovered") > 0.5;

  Outcome out;
  out.pass = m2 > 0.0 && m3 > 0.0 && m4 > 0.0 &&
             recovered > static_cast<int>(result.runs.size()) / 2;
  out.detail = fmt("within-between margins g2 %.3f g3 %.3f g4 %.3f (>0); "
                   "exact recovery %d/%zu (majority)",
                   m2, m3, m4, recovered, result.runs.size());
  return out;
}

// ---------------------------------------------------------------- criterion 9

Outcome criterion_moe() {
  ProtocolOptions opt;
  opt.replications = 5;
  opt.keep_fraction = 0.2;
  opt.seed = 6;
  const auto result = run_protocol("table5-moe", opt);
  const auto agg = aggregate_best(result, opt.keep_fraction);

  const double nmi_true = get(agg, "moe.nmi_gate_true");
  const double nmi_post = get(agg, "moe.nmi_gate_post");

  // Context for the second number: the same NMI evaluated at the generating
  // parameters.  Soft gates cap it well below 1 no matter how good the fit is.
  double ceiling = 0.0;
  for (int rep = 0; rep < static_cast<int>(result.runs.size()); ++rep) {
    const std::uint64_t root = derive_seed(opt.seed, 106, rep);
    SynthSpec sp = spec_mid_dim(3, false, derive_seed(root, 1));
    const SynthData d = generate_moe(sp, 4);
    MixtureModel truth;
    truth.beta = d.truth.beta;
    truth.pi = VectorXd::Constant(3, 1.0 / 3.0);
    truth.families = d.data.tasks;
    const GatingModel gate{d.truth.alpha};
    const auto rho = moe_responsibilities(truth, gate, d.data);
    ceiling += nmi(gating_probs(gate, d.data.X), rho.rho);
  }
  ceiling /= static_cast<double>(result.runs.size());

  Outcome out;
  out.pass = nmi_true > 0.9 && nmi_post > 0.9;
  out.detail = fmt("gate vs truth NMI %.4f, gate vs posteriors NMI %.4f (both > 0.9); "
                   "posterior NMI at the generating parameters is %.4f for this "
                   "generator",
                   nmi_true, nmi_post, ceiling);
  return out;
}

// --------------------------------------------------------------- criterion 10

Outcome criterion_metric_oracles() {
  Rng rng(606);
  double worst_nmi = 0.0, worst_auc = 0.0, worst_nmse = 0.0;

  for (int trial = 0; trial < 20; ++trial) {
    // NMI vs contingency oracle
    const int n = 200;
    std::vector<int> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = rng.uniform_int(3);
      b[i] = i % 2 ? a[i] : rng.uniform_int(3);
    }
    std::map<int, int> ca, cb;
    std::map<std::pair<int, int>, int> joint;
    for (int i = 0; i < n; ++i) {
      ca[a[i]]++;
      cb[b[i]]++;
      joint[{a[i], b[i]}]++;
    }
    double mi = 0.0, ha = 0.0, hb = 0.0;
    for (const auto& [key, cnt] : joint) {
      const double pj = static_cast<double>(cnt) / n;
      mi += pj * std::log(pj * n * n / (static_cast<double>(ca[key.first]) *
                                        cb[key.second]));
    }
    for (const auto& [_, cnt] : ca) ha -= (double(cnt) / n) * std::log(double(cnt) / n);
    for (const auto& [_, cnt] : cb) hb -= (double(cnt) / n) * std::log(double(cnt) / n);
    const double oracle = mi / std::sqrt(ha * hb);
    worst_nmi = std::max(worst_nmi,
                         std::abs(nmi(one_hot(a, 3), one_hot(b, 3)) - oracle));

    // AUC vs the O(n^2) pair count
    VectorXd s(60);
    std::vector<int> lbl(60);
    for (int i = 0; i < 60; ++i) {
      s(i) = std::round(rng.uniform(0.0, 10.0)) / 5.0;
      lbl[i] = i % 3 == 0 ? 1 : 0;
    }
    double num = 0.0;
    long pairs = 0;
    for (int i = 0; i < 60; ++i) {
      if (lbl[i] != 1) continue;
      for (int j = 0; j < 60; ++j) {
        if (lbl[j] != 0) continue;
        ++pairs;
        num += s(i) > s(j) ? 1.0 : (s(i) == s(j) ? 0.5 : 0.0);
      }
    }
    worst_auc = std::max(worst_auc, std::abs(*rank_auc(s, lbl) - num / pairs));

    // nmse vs the per-task loop
    std::vector<Family> fams{{FamilyKind::Gaussian, 1.0}, {FamilyKind::Poisson, 1.0}};
    MatrixXd truth(25, 2), pred(25, 2);
    BoolMask mask(25, 2);
    for (int i = 0; i < 25; ++i) {
      truth(i, 0) = rng.normal() * 2.0;
      truth(i, 1) = static_cast<double>(rng.poisson(4.0));
      pred(i, 0) = truth(i, 0) + 0.5 * rng.normal();
      pred(i, 1) = std::abs(truth(i, 1) + rng.normal());
      mask(i, 0) = rng.bernoulli(0.8);
      mask(i, 1) = rng.bernoulli(0.8);
    }
    const auto got = nmse(pred, truth, mask, fams);
    double acc = 0.0;
    int cnt = 0;
    for (int j = 0; j < 2; ++j) {
      std::vector<double> t, p;
      for (int i = 0; i < 25; ++i) {
        if (!mask(i, j)) continue;
        const bool lg = fams[j].kind == FamilyKind::Poisson;
        t.push_back(lg ? std::log1p(truth(i, j)) : truth(i, j));
        p.push_back(lg ? std::log1p(pred(i, j)) : pred(i, j));
      }
      if (t.size() < 2) continue;
      double mu = 0.0;
      for (double v : t) mu += v;
      mu /= t.size();
      double var = 0.0, mse = 0.0;
      for (size_t ii = 0; ii < t.size(); ++ii) {
        var += (t[ii] - mu) * (t[ii] - mu);
        mse += (t[ii] - p[ii]) * (t[ii] - p[ii]);
      }
      if (var <= 0.0) continue;
      acc += (mse / t.size()) / (var / t.size());
      ++cnt;
    }
    worst_nmse = std::max(worst_nmse, std::abs(*got - acc / cnt));
  }

  Outcome out;
  out.pass = worst_nmi < 1e-9 && worst_auc == 0.0 && worst_nmse < 1e-12;
  out.detail = fmt("max dev: nmi %.2e (<1e-9), auc %.2e (exact), nmse %.2e (<1e-12)",
                   worst_nmi, worst_auc, worst_nmse);
  return out;
}

// --------------------------------------------------------------- criterion 11

Outcome criterion_scaling() {
  ProtocolOptions opt;
  opt.replications = 1;
  opt.seed = 7;
  const auto result = run_protocol("scaling", opt);
  const auto agg = aggregate_best(result, 1.0);

  std::vector<double> rates;
  std::string detail;
  for (int d : {32, 256})
    for (int m : {15, 60}) {
      const std::string key =
          "scaling.d" + std::to_string(d) + "_m" + std::to_string(m);
      const double rate = get(agg, key + "_sec_per_nnz");
      rates.push_back(rate);
      detail += fmt("d%d,m%d: %.2es/nnz ", d, m, rate);
    }
  const double lo = *std::min_element(rates.begin(), rates.end());
  const double hi = *std::max_element(rates.begin(), rates.end());

  Outcome out;
  out.pass = lo > 0.0 && hi / lo < 3.0;
  out.detail = detail + fmt("ratio %.2f (<3)", hi / lo);
  return out;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int a = 1; a < argc; ++a)
    if (std::strcmp(argv[a], "--criterion") == 0 && a + 1 < argc)
      only = std::atoi(argv[a + 1]);

  const std::vector<Criterion> criteria = {
      {1, "GEM monotonicity", criterion_gem_monotonicity},
      {2, "gradient correctness", criterion_gradients},
      {3, "prox oracle equivalence", criterion_prox},
      {4, "imputation vs single-model baselines", criterion_table1},
      {5, "latent recovery and selection ordering", criterion_fig1},
      {6, "two-stage robustness under contamination", criterion_table4},
      {7, "anomaly-task score separation", criterion_scores},
      {8, "task-group similarity and clustering", criterion_clusters},
      {9, "gate concordance", criterion_moe},
      {10, "metric oracles", criterion_metric_oracles},
      {11, "scaling sanity", criterion_scaling},
  };

  bool all_pass = true;
  for (const auto& criterion : criteria) {
    if (only != 0 && criterion.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %2d (%s): %s [%.1fs]\n",
                outcome.pass ? "PASS" : "FAIL", criterion.id, criterion.name,
                outcome.detail.c_str(), secs);
    std::fflush(stdout);
    all_pass = all_pass && outcome.pass;
  }
  return all_pass ? 0 : 1;
}
