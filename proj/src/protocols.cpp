#include "hermit/protocols.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "hermit/metrics.hpp"
#include "hermit/moe.hpp"
#include "hermit/model.hpp"
#include "hermit/parallel.hpp"
#include "hermit/rng.hpp"
#include "hermit/robust.hpp"
#include "hermit/solver.hpp"
#include "hermit/taskdiag.hpp"
#include "hermit/tune.hpp"

namespace hermit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double or_nan(const std::optional<double>& v) { return v ? *v : kNaN; }

std::vector<double> pick_grid(const std::vector<double>& override_grid,
                              std::vector<double> fallback) {
  return override_grid.empty() ? std::move(fallback) : override_grid;
}

TuneResult tune_arm(const Dataset& train, const Dataset& valid, PenaltyKind kind, int k,
                    const std::vector<double>& lambdas, std::uint64_t seed) {
  GridSpec grid;
  grid.lambdas = lambdas;
  grid.ks = {k};
  grid.kinds = {kind};
  FitConfig base;
  base.seed = seed;
  return tune(train, valid, grid, base, 1);
}

// ----- sub-model machinery for the Single / Sep / Mix / Mix GS comparison --

struct GroupedMethodEval {
  double nmi_value = kNaN;
  double fsauc = kNaN;
  double valid_ll = 0.0;
};

// Fits one mixture per task group, averages the latent-recovery NMI over the
// groups, and merges the matched coefficient blocks for one selection AUC.
GroupedMethodEval eval_grouped_method(const Dataset& train, const Dataset& valid,
                                      const GroundTruth& truth,
                                      const std::vector<std::vector<int>>& groups,
                                      PenaltyKind kind, int k,
                                      const std::vector<double>& lambdas,
                                      std::uint64_t seed) {
  const int d = train.d();
  const int m = train.m();
  std::vector<Eigen::MatrixXd> merged(truth.beta.size(),
                                      Eigen::MatrixXd::Zero(d, m));
  double nmi_sum = 0.0;
  int nmi_cnt = 0;
  double vll = 0.0;

  for (size_t g = 0; g < groups.size(); ++g) {
    const auto& cols = groups[g];
    std::vector<int> kept;
    const Dataset sub_train = select_tasks(train, cols, &kept);
    const Dataset sub_valid = select_tasks(valid, cols);
    TuneResult res =
        tune_arm(sub_train, sub_valid, kind, k, lambdas, derive_seed(seed, g));
    vll += res.best.valid_ll;

    std::vector<int> delta_sub(kept.size());
    for (size_t i = 0; i < kept.size(); ++i) delta_sub[i] = truth.delta[kept[i]];
    nmi_sum += nmi(res.rho.rho, one_hot(delta_sub, static_cast<int>(truth.beta.size())));
    ++nmi_cnt;

    std::vector<Eigen::MatrixXd> truth_block(truth.beta.size());
    for (size_t r = 0; r < truth.beta.size(); ++r) {
      truth_block[r].resize(d, cols.size());
      for (size_t c = 0; c < cols.size(); ++c)
        truth_block[r].col(c) = truth.beta[r].col(cols[c]);
    }
    const auto perm = match_components(res.model.beta, truth_block);
    for (size_t r = 0; r < truth.beta.size(); ++r)
      for (size_t c = 0; c < cols.size(); ++c)
        merged[r].col(cols[c]) = res.model.beta[perm[r]].col(c);
  }

  GroupedMethodEval out;
  out.nmi_value = nmi_cnt ? nmi_sum / nmi_cnt : kNaN;
  out.fsauc = or_nan(feature_selection_auc(merged, truth.beta, true));
  out.valid_ll = vll;
  return out;
}

// ------------------------------ protocols ----------------------------------

ProtocolResult protocol_table1(const ProtocolOptions& opt) {
  ProtocolResult result;
  result.name = "table1";
  result.runs.resize(opt.replications);
  const auto lambdas = pick_grid(opt.lambda_grid, log_spaced(1e-3, 1.0, 7));

  parallel_for(opt.replications, opt.jobs, [&](int rep) {
    const std::uint64_t root = derive_seed(opt.seed, 101, rep);
    const SynthSpec sp = spec_mid_dim(3, false, derive_seed(root, 1));
    SynthData train = generate(sp);
    SynthData valid = generate_with_truth(sp, train.truth, derive_seed(root, 2));
    SynthData test = generate_with_truth(sp, train.truth, derive_seed(root, 3));

    auto& metrics = result.runs[rep].metrics;
    const struct {
      const char* name;
      int k;
    } arms[] = {{"mix", 3}, {"lasso", 1}};
    for (const auto& arm : arms) {
      TuneResult res = tune_arm(train.data, valid.data, PenaltyKind::Entrywise, arm.k,
                                lambdas, derive_seed(root, 10 + arm.k));
      const PredictionMetrics pm =
          impute_benchmark(res.model, test.data, 0.5, derive_seed(root, 20 + arm.k));
      const std::string p = arm.name;
      metrics[p + ".valid_ll"] = res.best.valid_ll;
      metrics[p + ".lambda"] = res.best.lambda;
      metrics[p + ".nmse"] = or_nan(pm.nmse_gaussian);
      metrics[p + ".aauc"] = or_nan(pm.aauc);
    }
  });
  return result;
}

ProtocolResult protocol_fig1(const ProtocolOptions& opt) {
  ProtocolResult result;
  result.name = "fig1";
  result.runs.resize(opt.replications);
  const auto lambdas = pick_grid(opt.lambda_grid, log_spaced(1e-3, 1.0, 6));

  parallel_for(opt.replications, opt.jobs, [&](int rep) {
    const std::uint64_t root = derive_seed(opt.seed, 102, rep);
    auto& metrics = result.runs[rep].metrics;

    const double rates[] = {0.0, 0.2};
    const char* tags[] = {"m0", "m20"};
    for (int ri = 0; ri < 2; ++ri) {
      SynthSpec sp = spec_low_dim(rates[ri], derive_seed(root, 1 + ri));
      SynthData train = generate(sp);
      SynthData valid =
          generate_with_truth(sp, train.truth, derive_seed(root, 11 + ri));

      std::vector<std::vector<int>> single, sep, all;
      for (int j = 0; j < train.data.m(); ++j) single.push_back({j});
      for (FamilyKind kind :
           {FamilyKind::Gaussian, FamilyKind::Bernoulli, FamilyKind::Poisson}) {
        auto cols = task_indices_of_kind(train.data, kind);
        if (!cols.empty()) sep.push_back(std::move(cols));
      }
      {
        std::vector<int> cols(train.data.m());
        std::iota(cols.begin(), cols.end(), 0);
        all.push_back(std::move(cols));
      }

      const struct {
        const char* name;
        const std::vector<std::vector<int>>* groups;
        PenaltyKind kind;
      } arms[] = {{"single", &single, PenaltyKind::Entrywise},
                  {"sep", &sep, PenaltyKind::Entrywise},
                  {"mix", &all, PenaltyKind::Entrywise},
                  {"mixgs", &all, PenaltyKind::RowGroup}};
      for (size_t a = 0; a < 4; ++a) {
        const auto ev =
            eval_grouped_method(train.data, valid.data, train.truth, *arms[a].groups,
                                arms[a].kind, sp.k_true, lambdas,
                                derive_seed(root, 100 + 10 * ri + a));
        const std::string p = std::string(arms[a].name) + "_" + tags[ri];
        metrics[p + ".nmi"] = ev.nmi_value;
        metrics[p + ".fsauc"] = ev.fsauc;
        metrics[p + ".valid_ll"] = ev.valid_ll;
      }
    }
  });
  return result;
}

ProtocolResult protocol_table4(const ProtocolOptions& opt) {
  ProtocolResult result;
  result.name = "table4";
  result.runs.resize(opt.replications);
  const auto lambdas = pick_grid(opt.lambda_grid, {0.01, 0.05, 0.2, 0.8});
  const auto robust_lambdas =
      pick_grid(opt.lambda_grid, std::vector<double>{0.05, 0.2});
  const auto lambda2s = pick_grid(opt.lambda2_grid, {5e-3, 1.5e-2, 5e-2});

  parallel_for(opt.replications, opt.jobs, [&](int rep) {
    const std::uint64_t root = derive_seed(opt.seed, 103, rep);
    const SynthSpec sp = spec_mid_dim(2, true, derive_seed(root, 1));
    SynthData train = generate(sp);
    SynthData valid = generate_with_truth(sp, train.truth, derive_seed(root, 2));
    SynthData test = generate_with_truth(sp, train.truth, derive_seed(root, 3));
    auto& metrics = result.runs[rep].metrics;

    const double contams[] = {0.0, 0.05};
    const char* tags[] = {"c0", "c5"};
    for (int ci = 0; ci < 2; ++ci) {
      const auto [ctrain, crows] =
          contaminate(train.data, contams[ci], derive_seed(root, 30 + ci));
      const auto [cvalid, vrows] =
          contaminate(valid.data, contams[ci], derive_seed(root, 40 + ci));

      {
        TuneResult res = tune_arm(ctrain, cvalid, PenaltyKind::Entrywise, 2, lambdas,
                                  derive_seed(root, 50 + ci));
        const PredictionMetrics pm =
            impute_benchmark(res.model, test.data, 0.5, derive_seed(root, 60 + ci));
        const std::string p = std::string("nonrobust_") + tags[ci];
        metrics[p + ".valid_ll"] = res.best.valid_ll;
        metrics[p + ".nmse_gaussian"] = or_nan(pm.nmse_gaussian);
        metrics[p + ".nmse_poisson"] = or_nan(pm.nmse_poisson);
        metrics[p + ".aauc"] = or_nan(pm.aauc);
      }

      {
        double best_score = -std::numeric_limits<double>::infinity();
        MixtureModel best_model;
        double best_l1 = kNaN, best_l2 = kNaN;
        int cell = 0;
        for (double l1 : robust_lambdas)
          for (double l2 : lambda2s) {
            PenaltyConfig pen;
            pen.kind = PenaltyKind::Entrywise;
            pen.lambda = l1;
            RobustConfig rc;
            rc.lambda2 = l2;
            rc.p_clean = contams[ci];
            rc.base.k = 2;
            rc.base.seed = derive_seed(root, 70 + ci, cell++);
            TwoStageResult ts = two_stage(ctrain, pen, rc);
            const double score = log_likelihood(ts.model, cvalid);
            if (score > best_score) {
              best_score = score;
              best_model = std::move(ts.model);
              best_l1 = l1;
              best_l2 = l2;
            }
          }
        const PredictionMetrics pm =
            impute_benchmark(best_model, test.data, 0.5, derive_seed(root, 80 + ci));
        const std::string p = std::string("robust_") + tags[ci];
        metrics[p + ".valid_ll"] = best_score;
        metrics[p + ".lambda"] = best_l1;
        metrics[p + ".lambda2"] = best_l2;
        metrics[p + ".nmse_gaussian"] = or_nan(pm.nmse_gaussian);
        metrics[p + ".nmse_poisson"] = or_nan(pm.nmse_poisson);
        metrics[p + ".aauc"] = or_nan(pm.aauc);
      }
    }
  });
  return result;
}

ProtocolResult protocol_table2_scores(const ProtocolOptions& opt) {
  ProtocolResult result;
  result.name = "table2-scores";
  result.runs.resize(opt.replications);
  const auto lambdas = pick_grid(opt.lambda_grid, {0.02, 0.08, 0.3});

  parallel_for(opt.replications, opt.jobs, [&](int rep) {
    const std::uint64_t root = derive_seed(opt.seed, 104, rep);
    auto specs = specs_anomaly_tasks(derive_seed(root, 1));
    GroupedSynthData train = generate_grouped(specs, derive_seed(root, 2));
    GroupedSynthData valid =
        generate_grouped_with_truths(specs, train.truths, derive_seed(root, 3));

    TuneResult res = tune_arm(train.data, valid.data, PenaltyKind::Entrywise, 4,
                              lambdas, derive_seed(root, 4));
    const auto scores = concordant_scores(res.model, train.data);

    const int concordant_end = train.task_ranges[0].second;  // first 20 tasks
    double min_conc = std::numeric_limits<double>::infinity();
    double max_anom = -std::numeric_limits<double>::infinity();
    for (int h = 0; h < train.data.m(); ++h) {
      if (!scores[h]) continue;
      if (h < concordant_end)
        min_conc = std::min(min_conc, *scores[h]);
      else
        max_anom = std::max(max_anom, *scores[h]);
    }
    auto& metrics = result.runs[rep].metrics;
    metrics["scores.min_concordant"] = min_conc;
    metrics["scores.max_anomaly"] = max_anom;
    metrics["scores.margin"] = min_conc - max_anom;
    metrics["scores.separated"] = min_conc > max_anom ? 1.0 : 0.0;
    metrics["scores.lambda"] = res.best.lambda;
  });
  return result;
}

ProtocolResult protocol_table3_clusters(const ProtocolOptions& opt) {
  ProtocolResult result;
  result.name = "table3-clusters";
  result.runs.resize(opt.replications);
  const auto lambdas = pick_grid(opt.lambda_grid, {3e-3, 3e-2, 0.3});

  parallel_for(opt.replications, opt.jobs, [&](int rep) {
    const std::uint64_t root = derive_seed(opt.seed, 105, rep);
    auto specs = specs_task_groups(derive_seed(root, 1));
    GroupedSynthData train = generate_grouped(specs, derive_seed(root, 2));
    GroupedSynthData valid =
        generate_grouped_with_truths(specs, train.truths, derive_seed(root, 3));

    TaskSimilarityConfig tc;
    tc.per_task_k = 20;
    tc.pen.kind = PenaltyKind::Entrywise;
    tc.fit.seed = derive_seed(root, 4);
    tc.lambda_grid = lambdas;
    tc.jobs = 1;
    const TaskSimilarity sim = task_similarity(train.data, valid.data, tc);

    auto& metrics = result.runs[rep].metrics;
    const auto& ranges = train.task_ranges;
    for (int g = 1; g < 4; ++g) {  // groups 2..4
      double within = 0.0, between = 0.0;
      int wc = 0, bc = 0;
      for (int u = ranges[g].first; u < ranges[g].second; ++u) {
        for (int v = u + 1; v < ranges[g].second; ++v) {
          within += sim.matrix(u, v);
          ++wc;
        }
        for (int v = 0; v < train.data.m(); ++v) {
          if (v >= ranges[g].first && v < ranges[g].second) continue;
          between += sim.matrix(u, v);
          ++bc;
        }
      }
      within /= std::max(1, wc);
      between /= std::max(1, bc);
      const std::string p = "clusters.g" + std::to_string(g + 1);
      metrics[p + "_within"] = within;
      metrics[p + "_between"] = between;
      metrics[p + "_margin"] = within - between;
    }

    const Eigen::MatrixXd emb = kernel_pca(sim, 2);
    const auto labels = cluster_tasks(emb, 4, derive_seed(root, 5));
    bool recovered = true;
    std::set<int> used;
    for (int g = 1; g < 4 && recovered; ++g) {
      std::set<int> lbls;
      for (int h = ranges[g].first; h < ranges[g].second; ++h) lbls.insert(labels[h]);
      if (lbls.size() != 1 || used.count(*lbls.begin())) recovered = false;
      else used.insert(*lbls.begin());
    }
    metrics["clusters.recovered"] = recovered ? 1.0 : 0.0;
  });
  return result;
}

ProtocolResult protocol_table5_moe(const ProtocolOptions& opt) {
  ProtocolResult result;
  result.name = "table5-moe";
  result.runs.resize(opt.replications);
  const auto lambdas = pick_grid(opt.lambda_grid, log_spaced(3e-3, 0.3, 5));
  const auto lambda2s = pick_grid(opt.lambda2_grid, {1e-3, 1e-2});

  parallel_for(opt.replications, opt.jobs, [&](int rep) {
    const std::uint64_t root = derive_seed(opt.seed, 106, rep);
    SynthSpec sp = spec_mid_dim(3, false, derive_seed(root, 1));
    SynthData train = generate_moe(sp, 4);
    SynthData valid = generate_with_truth(sp, train.truth, derive_seed(root, 2));
    SynthData test = generate_with_truth(sp, train.truth, derive_seed(root, 3));

    GridSpec grid;
    grid.lambdas = lambdas;
    grid.lambda2s = lambda2s;
    grid.ks = {3};
    grid.kinds = {PenaltyKind::Entrywise};
    grid.moe = true;
    FitConfig base;
    base.seed = derive_seed(root, 4);
    TuneResult res = tune(train.data, valid.data, grid, base, 1);

    const Eigen::MatrixXd gate_train = gating_probs(*res.gate, train.data.X);
    GatingModel true_gate{train.truth.alpha};
    const Eigen::MatrixXd gate_true = gating_probs(true_gate, train.data.X);

    const Eigen::MatrixXd pred = predict_moe(res.model, *res.gate, test.data.X);
    const PredictionMetrics pm = prediction_metrics(pred, test.data, test.data.observed);

    auto& metrics = result.runs[rep].metrics;
    metrics["moe.valid_ll"] = res.best.valid_ll;
    metrics["moe.nmi_gate_true"] = nmi(gate_train, gate_true);
    metrics["moe.nmi_gate_post"] = nmi(gate_train, res.rho.rho);
    metrics["moe.nmse"] = or_nan(pm.nmse);
    metrics["moe.aauc"] = or_nan(pm.aauc);
    metrics["moe.lambda"] = res.best.lambda;
    metrics["moe.lambda2"] = res.best.lambda2;
  });
  return result;
}

ProtocolResult protocol_scaling(const ProtocolOptions& opt) {
  ProtocolResult result;
  result.name = "scaling";
  result.runs.resize(opt.replications);
  const auto lambdas = pick_grid(opt.lambda_grid, {0.05, 0.15, 0.5});

  parallel_for(opt.replications, opt.jobs, [&](int rep) {
    const std::uint64_t root = derive_seed(opt.seed, 107, rep);
    auto& metrics = result.runs[rep].metrics;

    const int dims[] = {32, 256};
    const int tasks[] = {15, 60};
    for (int d : dims) {
      for (int m : tasks) {
        SynthSpec sp;
        sp.n = 1000;
        sp.d = d;
        sp.m_gaussian = m / 5;          // 3:10:2 mix, as in the mid-dim recipe
        sp.m_poisson = (2 * m) / 15;
        sp.m_bernoulli = m - sp.m_gaussian - sp.m_poisson;
        sp.k_true = 4;
        sp.sparsity = 4;
        sp.coef_range = {2.0, 6.0};
        sp.missing_rate = 0.2;
        sp.seed = derive_seed(root, 200 + d + m);
        SynthData train = generate(sp);
        SynthData valid = generate_with_truth(sp, train.truth, derive_seed(root, 300 + d + m));

        TuneResult res = tune_arm(train.data, valid.data, PenaltyKind::RowGroup, 4,
                                  lambdas, derive_seed(root, 400 + d + m));
        PenaltyConfig pen;
        pen.kind = PenaltyKind::RowGroup;
        pen.lambda = res.best.lambda;
        FitConfig cfg;
        cfg.k = 4;
        cfg.seed = derive_seed(root, 500 + d + m);

        const auto t0 = std::chrono::steady_clock::now();
        FitResult timed = fit(train.data, pen, cfg);
        const auto t1 = std::chrono::steady_clock::now();
        const double secs = std::chrono::duration<double>(t1 - t0).count();

        long nnz = 0;
        for (const auto& slice : timed.model.beta)
          nnz += (slice.array() != 0.0).count();
        const std::string p =
            "scaling.d" + std::to_string(d) + "_m" + std::to_string(m);
        metrics[p + "_seconds"] = secs;
        metrics[p + "_nnz"] = static_cast<double>(nnz);
        metrics[p + "_sec_per_nnz"] = secs / std::max<long>(1, nnz);
      }
    }
  });
  return result;
}

}  // namespace

SynthSpec spec_low_dim(double missing_rate, std::uint64_t seed) {
  SynthSpec sp;
  sp.n = 100;
  sp.d = 15;
  sp.m_gaussian = 3;
  sp.m_bernoulli = 10;
  sp.m_poisson = 2;
  sp.k_true = 2;
  sp.sparsity = 3;
  sp.coef_range = {1.0, 3.0};
  sp.poisson_coef_range = {0.1, 0.3};
  sp.bias = 1.0;
  sp.poisson_bias = 3.0;
  sp.missing_rate = missing_rate;
  sp.seed = seed;
  return sp;
}

SynthSpec spec_mid_dim(int k_true, bool with_poisson, std::uint64_t seed) {
  SynthSpec sp;
  sp.n = 1000;
  sp.d = 32;
  sp.m_gaussian = 3;
  sp.m_bernoulli = 10;
  sp.m_poisson = with_poisson ? 2 : 0;
  sp.k_true = k_true;
  sp.sparsity = derived_sparsity(sp.d, k_true);
  sp.coef_range = {2.0, 6.0};
  sp.poisson_coef_range = {0.1, 0.3};
  sp.bias = 1.0;
  sp.poisson_bias = 3.0;
  sp.missing_rate = 0.2;
  sp.seed = seed;
  return sp;
}

std::vector<SynthSpec> specs_anomaly_tasks(std::uint64_t seed) {
  const struct {
    int k, g, b, p;
  } rows[] = {{4, 5, 10, 5}, {1, 1, 1, 1}, {6, 1, 0, 0},
              {2, 1, 1, 0}, {3, 0, 1, 1}, {5, 1, 1, 0}};
  std::vector<SynthSpec> specs;
  for (const auto& row : rows) {
    SynthSpec sp = spec_mid_dim(row.k, true, seed);
    sp.n = 2000;
    sp.m_gaussian = row.g;
    sp.m_bernoulli = row.b;
    sp.m_poisson = row.p;
    sp.sparsity = derived_sparsity(sp.d, row.k);
    specs.push_back(sp);
  }
  return specs;
}

std::vector<SynthSpec> specs_task_groups(std::uint64_t seed) {
  std::vector<SynthSpec> specs;
  for (int k = 1; k <= 4; ++k) {
    SynthSpec sp = spec_mid_dim(k, true, seed);
    sp.n = 2000;
    specs.push_back(sp);
  }
  return specs;
}

std::map<std::string, Aggregate> aggregate_best(const ProtocolResult& result,
                                                double keep_fraction) {
  if (keep_fraction <= 0.0 || keep_fraction > 1.0)
    throw std::invalid_argument("aggregate_best: keep fraction in (0,1]");
  const int runs = static_cast<int>(result.runs.size());
  if (runs == 0) return {};
  const int keep = std::max(1, static_cast<int>(std::floor(keep_fraction * runs + 1e-9)));

  // method group -> metric names
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& run : result.runs)
    for (const auto& [key, _] : run.metrics) {
      const auto dot = key.find('.');
      const std::string prefix = dot == std::string::npos ? "" : key.substr(0, dot);
      auto& names = groups[prefix];
      if (std::find(names.begin(), names.end(), key) == names.end())
        names.push_back(key);
    }

  std::map<std::string, Aggregate> out;
  for (const auto& [prefix, names] : groups) {
    std::vector<int> order(runs);
    std::iota(order.begin(), order.end(), 0);
    const std::string rank_key = prefix + ".valid_ll";
    bool ranked = false;
    for (const auto& name : names) ranked = ranked || name == rank_key;
    int kept = runs;
    if (ranked) {
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        auto va = result.runs[a].metrics.find(rank_key);
        auto vb = result.runs[b].metrics.find(rank_key);
        const double sa = va == result.runs[a].metrics.end() ? -1e300 : va->second;
        const double sb = vb == result.runs[b].metrics.end() ? -1e300 : vb->second;
        return sa > sb;
      });
      kept = keep;
    }

    for (const auto& name : names) {
      double sum = 0.0, sum_sq = 0.0;
      int cnt = 0;
      for (int oi = 0; oi < kept; ++oi) {
        const auto it = result.runs[order[oi]].metrics.find(name);
        if (it == result.runs[order[oi]].metrics.end() || !std::isfinite(it->second))
          continue;
        sum += it->second;
        sum_sq += it->second * it->second;
        ++cnt;
      }
      Aggregate agg;
      agg.count = cnt;
      if (cnt > 0) {
        agg.mean = sum / cnt;
        if (cnt > 1) {
          const double var = std::max(0.0, (sum_sq - sum * sum / cnt) / (cnt - 1));
          agg.stddev = std::sqrt(var);
        }
      } else {
        agg.mean = kNaN;
        agg.stddev = kNaN;
      }
      out[name] = agg;
    }
  }
  return out;
}

std::vector<std::string> protocol_names() {
  return {"table1", "fig1",       "table4",  "table2-scores",
          "table3-clusters", "table5-moe", "scaling"};
}

ProtocolResult run_protocol(const std::string& name, const ProtocolOptions& options) {
  if (options.replications < 1)
    throw std::invalid_argument("run_protocol: need at least one replication");
  if (name == "table1") return protocol_table1(options);
  if (name == "fig1") return protocol_fig1(options);
  if (name == "table4") return protocol_table4(options);
  if (name == "table2-scores") return protocol_table2_scores(options);
  if (name == "table3-clusters") return protocol_table3_clusters(options);
  if (name == "table5-moe") return protocol_table5_moe(options);
  if (name == "scaling") return protocol_scaling(options);
  throw std::invalid_argument("unknown protocol: " + name);
}

}  // namespace hermit
