// Command-line front end: simulation, fitting, tuning, imputation, task
// diagnostics, outlier detection, metric evaluation, and the replication
// harness.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "hermit/datagen.hpp"
#include "hermit/io.hpp"
#include "hermit/metrics.hpp"
#include "hermit/moe.hpp"
#include "hermit/protocols.hpp"
#include "hermit/robust.hpp"
#include "hermit/solver.hpp"
#include "hermit/taskdiag.hpp"
#include "hermit/tune.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct DataArgs {
  std::string csv;
  std::string tasks;
};

void add_data_options(CLI::App* cmd, DataArgs& args, const std::string& name,
                      bool required = true) {
  auto* csv = cmd->add_option("--" + name, args.csv, name + " dataset CSV");
  cmd->add_option("--tasks", args.tasks, "tasks sidecar JSON")->required();
  if (required) csv->required();
}

hermit::Dataset load_data(const DataArgs& args) {
  return hermit::read_dataset_csv(args.csv, args.tasks);
}

fs::path ensure_out_dir(const std::string& out) {
  fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  fs::create_directories(dir);
  return dir;
}

hermit::PenaltyKind parse_penalty(const std::string& name) {
  if (name == "lasso") return hermit::PenaltyKind::Entrywise;
  if (name == "group") return hermit::PenaltyKind::RowGroup;
  throw CLI::ValidationError("--penalty must be 'lasso' or 'group'");
}

void write_trace_csv(const fs::path& path, const hermit::FitReport& report) {
  std::ofstream out(path);
  out << "iteration,objective,inner_iterations\n";
  for (size_t t = 0; t < report.objective_trace.size(); ++t)
    out << t << "," << std::setprecision(17) << report.objective_trace[t] << ","
        << report.inner_iterations[t] << "\n";
}

void write_matrix_csv(const fs::path& path, const Eigen::MatrixXd& mat,
                      const std::string& header) {
  std::ofstream out(path);
  out << header << "\n";
  for (int i = 0; i < mat.rows(); ++i) {
    for (int j = 0; j < mat.cols(); ++j)
      out << (j ? "," : "") << std::setprecision(17) << mat(i, j);
    out << "\n";
  }
}

json metrics_json(const hermit::PredictionMetrics& pm) {
  json j;
  j["n_eval"] = pm.n_eval;
  if (pm.nmse) j["nmse"] = *pm.nmse;
  if (pm.nmse_gaussian) j["nmse_gaussian"] = *pm.nmse_gaussian;
  if (pm.nmse_poisson) j["nmse_poisson"] = *pm.nmse_poisson;
  if (pm.aauc) j["aauc"] = *pm.aauc;
  return j;
}

std::vector<double> parse_grid(const std::string& csv_list) {
  std::vector<double> out;
  std::stringstream ss(csv_list);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heterogeneous-target robust mixture regression"};
  app.require_subcommand(1);

  // ------------------------------------------------------------ simulate
  struct {
    std::string spec;
    std::string out = "synthetic";
  } sim;
  auto* cmd_sim = app.add_subcommand("simulate", "draw a synthetic dataset");
  cmd_sim->add_option("--spec", sim.spec, "SynthSpec JSON file")->required();
  cmd_sim->add_option("--out", sim.out, "output path prefix");

  // ----------------------------------------------------------------- fit
  struct {
    DataArgs train;
    std::string penalty = "lasso";
    double lambda = 0.0;
    double lambda2 = 0.0;
    double gamma = 1.0;
    int k = 1;
    bool moe = false;
    bool robust = false;
    std::optional<double> p_clean;
    std::uint64_t seed = 0;
    std::string out = "fit_out";
    std::string fit_cfg;
  } fit_args;
  auto* cmd_fit = app.add_subcommand("fit", "fit a mixture model");
  add_data_options(cmd_fit, fit_args.train, "train");
  cmd_fit->add_option("--penalty", fit_args.penalty, "lasso|group");
  cmd_fit->add_option("--lambda", fit_args.lambda, "penalty strength");
  cmd_fit->add_option("--lambda2", fit_args.lambda2, "mean-shift / gate strength");
  cmd_fit->add_option("--gamma", fit_args.gamma, "pi weight exponent {0,0.5,1}");
  cmd_fit->add_option("--k", fit_args.k, "number of components")->required();
  cmd_fit->add_flag("--moe", fit_args.moe, "feature-dependent mixture weights");
  cmd_fit->add_flag("--robust", fit_args.robust, "mean-shift outlier extension");
  cmd_fit->add_option("--p-clean", fit_args.p_clean,
                      "two-stage removal fraction (with --robust)");
  cmd_fit->add_option("--seed", fit_args.seed, "rng seed");
  cmd_fit->add_option("--out", fit_args.out, "output directory");
  cmd_fit->add_option("--fit-config", fit_args.fit_cfg, "FitConfig JSON file");

  // ---------------------------------------------------------------- tune
  struct {
    DataArgs train;
    std::string valid_csv;
    std::string penalty = "lasso";
    std::string lambdas;
    std::string lambda2s;
    std::string ks;
    double gamma = 1.0;
    bool moe = false;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string out = "tune_out";
  } tune_args;
  auto* cmd_tune = app.add_subcommand("tune", "grid search on validation likelihood");
  add_data_options(cmd_tune, tune_args.train, "train");
  cmd_tune->add_option("--valid", tune_args.valid_csv, "validation CSV")->required();
  cmd_tune->add_option("--penalty", tune_args.penalty,
                       "comma list from {lasso,group}");
  cmd_tune->add_option("--lambdas", tune_args.lambdas,
                       "comma list (default 30-point grid)");
  cmd_tune->add_option("--lambda2s", tune_args.lambda2s, "comma list (moe gate grid)");
  cmd_tune->add_option("--ks", tune_args.ks, "comma list (default 1..10)");
  cmd_tune->add_option("--gamma", tune_args.gamma, "pi weight exponent");
  cmd_tune->add_flag("--moe", tune_args.moe, "tune the mixture-of-experts variant");
  cmd_tune->add_option("--seed", tune_args.seed, "rng seed");
  cmd_tune->add_option("--jobs", tune_args.jobs, "parallel grid cells");
  cmd_tune->add_option("--out", tune_args.out, "output directory");

  // -------------------------------------------------------------- impute
  struct {
    DataArgs test;
    std::string model;
    double hide_fraction = 0.0;
    std::uint64_t seed = 0;
    std::string out = "impute_out";
  } imp;
  auto* cmd_impute = app.add_subcommand("impute", "fill unobserved targets");
  add_data_options(cmd_impute, imp.test, "test");
  cmd_impute->add_option("--model", imp.model, "model JSON")->required();
  cmd_impute->add_option("--hide-fraction", imp.hide_fraction,
                         "benchmark: hide this share of observed targets");
  cmd_impute->add_option("--seed", imp.seed, "rng seed for hiding");
  cmd_impute->add_option("--out", imp.out, "output directory");

  // ------------------------------------------------------------- predict
  struct {
    DataArgs test;
    std::string model;
    std::string out = "predict_out";
  } pred_args;
  auto* cmd_predict = app.add_subcommand("predict", "feature-only prediction");
  add_data_options(cmd_predict, pred_args.test, "test");
  cmd_predict->add_option("--model", pred_args.model, "model JSON")->required();
  cmd_predict->add_option("--out", pred_args.out, "output directory");

  // --------------------------------------------------------- score-tasks
  struct {
    DataArgs train;
    std::string model;
    std::string out = "scores_out";
  } score_args;
  auto* cmd_scores = app.add_subcommand("score-tasks", "concordant task scores");
  add_data_options(cmd_scores, score_args.train, "train");
  cmd_scores->add_option("--model", score_args.model, "model JSON")->required();
  cmd_scores->add_option("--out", score_args.out, "output directory");

  // ------------------------------------------------------- cluster-tasks
  struct {
    DataArgs train;
    std::string valid_csv;
    int per_task_k = 20;
    int groups = 2;
    int dims = 2;
    std::string lambdas;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string out = "clusters_out";
  } cl;
  auto* cmd_cluster =
      app.add_subcommand("cluster-tasks", "NMI similarity, kernel PCA, k-means");
  add_data_options(cmd_cluster, cl.train, "train");
  cmd_cluster->add_option("--valid", cl.valid_csv, "validation CSV")->required();
  cmd_cluster->add_option("--per-task-k", cl.per_task_k, "pre-fixed k per task");
  cmd_cluster->add_option("--groups", cl.groups, "number of task groups")->required();
  cmd_cluster->add_option("--dims", cl.dims, "embedding dimensions");
  cmd_cluster->add_option("--lambdas", cl.lambdas, "per-task lambda grid");
  cmd_cluster->add_option("--seed", cl.seed, "rng seed");
  cmd_cluster->add_option("--jobs", cl.jobs, "parallel single-task fits");
  cmd_cluster->add_option("--out", cl.out, "output directory");

  // ----------------------------------------------------- detect-outliers
  struct {
    DataArgs train;
    std::string penalty = "lasso";
    double lambda = 0.0;
    double lambda2 = 0.0;
    double gamma = 1.0;
    int k = 1;
    std::optional<double> p_clean;
    std::uint64_t seed = 0;
    std::string out = "outliers_out";
  } outl;
  auto* cmd_outliers =
      app.add_subcommand("detect-outliers", "mean-shift outlier scores");
  add_data_options(cmd_outliers, outl.train, "train");
  cmd_outliers->add_option("--penalty", outl.penalty, "lasso|group");
  cmd_outliers->add_option("--lambda", outl.lambda, "beta penalty strength");
  cmd_outliers->add_option("--lambda2", outl.lambda2, "zeta penalty strength")
      ->required();
  cmd_outliers->add_option("--gamma", outl.gamma, "pi weight exponent");
  cmd_outliers->add_option("--k", outl.k, "number of components")->required();
  cmd_outliers->add_option("--p-clean", outl.p_clean, "two-stage removal fraction");
  cmd_outliers->add_option("--seed", outl.seed, "rng seed");
  cmd_outliers->add_option("--out", outl.out, "output directory");

  // ------------------------------------------------------------ evaluate
  struct {
    std::string pred_csv;
    std::string truth_csv;
    std::string tasks;
    std::string out = "evaluate_out";
  } ev;
  auto* cmd_eval = app.add_subcommand("evaluate", "score predictions against truth");
  cmd_eval->add_option("--pred", ev.pred_csv, "prediction CSV")->required();
  cmd_eval->add_option("--truth", ev.truth_csv, "truth CSV")->required();
  cmd_eval->add_option("--tasks", ev.tasks, "tasks sidecar JSON")->required();
  cmd_eval->add_option("--out", ev.out, "output directory");

  // ----------------------------------------------------------- replicate
  struct {
    std::string protocol;
    int replications = 20;
    double keep = 0.2;
    std::string lambdas;
    std::string lambda2s;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string out = "replicate_out";
  } rep;
  auto* cmd_rep = app.add_subcommand("replicate", "seeded experiment replications");
  cmd_rep
      ->add_option("--protocol", rep.protocol,
                   "table1|fig1|table4|table2-scores|table3-clusters|table5-moe|"
                   "scaling")
      ->required();
  cmd_rep->add_option("--replications", rep.replications, "number of runs (>= 5)");
  cmd_rep->add_option("--keep", rep.keep, "best fraction kept by validation rank");
  cmd_rep->add_option("--lambdas", rep.lambdas, "lambda grid override");
  cmd_rep->add_option("--lambda2s", rep.lambda2s, "lambda2 grid override");
  cmd_rep->add_option("--seed", rep.seed, "root seed");
  cmd_rep->add_option("--jobs", rep.jobs, "parallel replications");
  cmd_rep->add_option("--out", rep.out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_sim->parsed()) {
      const json spec_json = hermit::load_json_file(sim.spec);
      const fs::path prefix(sim.out);
      if (prefix.has_parent_path()) fs::create_directories(prefix.parent_path());
      if (spec_json.contains("groups")) {
        std::vector<hermit::SynthSpec> specs;
        for (const auto& g : spec_json["groups"])
          specs.push_back(hermit::synth_spec_from_json(g));
        const std::uint64_t seed = spec_json.value("seed", 0ULL);
        const auto out = hermit::generate_grouped(specs, seed);
        hermit::write_dataset_csv(sim.out + ".csv", out.data);
        hermit::write_tasks_json(sim.out + ".tasks.json", out.data);
        json truth = json::array();
        for (const auto& t : out.truths)
          truth.push_back(hermit::ground_truth_to_json(t));
        hermit::write_json_file(sim.out + ".truth.json", json{{"groups", truth}});
      } else {
        const hermit::SynthSpec spec = hermit::synth_spec_from_json(spec_json);
        const int gate_rows = spec_json.value("moe_gate_rows", 0);
        const auto out = gate_rows > 0 ? hermit::generate_moe(spec, gate_rows)
                                       : hermit::generate(spec);
        hermit::write_dataset_csv(sim.out + ".csv", out.data);
        hermit::write_tasks_json(sim.out + ".tasks.json", out.data);
        hermit::write_json_file(sim.out + ".truth.json",
                                hermit::ground_truth_to_json(out.truth));
      }
      std::cout << "wrote " << sim.out << ".csv\n";
      return 0;
    }

    if (cmd_fit->parsed()) {
      const hermit::Dataset train = load_data(fit_args.train);
      const fs::path dir = ensure_out_dir(fit_args.out);
      hermit::PenaltyConfig pen;
      pen.kind = parse_penalty(fit_args.penalty);
      pen.lambda = fit_args.lambda;
      pen.gamma = fit_args.gamma;
      hermit::FitConfig cfg;
      if (!fit_args.fit_cfg.empty())
        cfg = hermit::fit_config_from_json(hermit::load_json_file(fit_args.fit_cfg));
      cfg.k = fit_args.k;
      cfg.seed = fit_args.seed;

      if (fit_args.moe && fit_args.robust)
        throw CLI::ValidationError("--moe and --robust are mutually exclusive");

      if (fit_args.moe) {
        const auto res = hermit::fit_moe(train, pen, fit_args.lambda2, cfg);
        hermit::save_model((dir / "model.json").string(), res.model, &res.gate);
        hermit::write_json_file((dir / "report.json").string(),
                                hermit::fit_report_to_json(res.report));
        write_trace_csv(dir / "trace.csv", res.report);
      } else if (fit_args.robust && fit_args.p_clean.has_value()) {
        hermit::RobustConfig rc;
        rc.lambda2 = fit_args.lambda2;
        rc.base = cfg;
        rc.p_clean = *fit_args.p_clean;
        const auto ts = hermit::two_stage(train, pen, rc);
        hermit::save_model((dir / "model.json").string(), ts.model);
        hermit::write_json_file((dir / "report.json").string(),
                                hermit::fit_report_to_json(ts.report));
        write_trace_csv(dir / "trace.csv", ts.report);
        std::ofstream kept(dir / "kept_rows.csv"), removed(dir / "removed_rows.csv");
        kept << "row\n";
        for (int i : ts.kept_rows) kept << i << "\n";
        removed << "row\n";
        for (int i : ts.removed_rows) removed << i << "\n";
      } else if (fit_args.robust) {
        hermit::RobustConfig rc;
        rc.lambda2 = fit_args.lambda2;
        rc.base = cfg;
        const auto res = hermit::fit_robust(train, pen, rc);
        hermit::save_model((dir / "model.json").string(), res.model);
        hermit::write_json_file((dir / "report.json").string(),
                                hermit::fit_report_to_json(res.report));
        write_trace_csv(dir / "trace.csv", res.report);
      } else {
        const auto res = hermit::fit(train, pen, cfg);
        hermit::save_model((dir / "model.json").string(), res.model);
        hermit::write_json_file((dir / "report.json").string(),
                                hermit::fit_report_to_json(res.report));
        write_trace_csv(dir / "trace.csv", res.report);
      }
      std::cout << "wrote " << (dir / "model.json").string() << "\n";
      return 0;
    }

    if (cmd_tune->parsed()) {
      const hermit::Dataset train = load_data(tune_args.train);
      const hermit::Dataset valid =
          hermit::read_dataset_csv(tune_args.valid_csv, tune_args.train.tasks);
      const fs::path dir = ensure_out_dir(tune_args.out);

      hermit::GridSpec grid;
      grid.moe = tune_args.moe;
      grid.gamma = tune_args.gamma;
      if (!tune_args.lambdas.empty()) grid.lambdas = parse_grid(tune_args.lambdas);
      if (!tune_args.lambda2s.empty()) grid.lambda2s = parse_grid(tune_args.lambda2s);
      if (!tune_args.ks.empty())
        for (double k : parse_grid(tune_args.ks))
          grid.ks.push_back(static_cast<int>(k));
      {
        std::stringstream ss(tune_args.penalty);
        std::string cell;
        while (std::getline(ss, cell, ','))
          grid.kinds.push_back(parse_penalty(cell));
      }
      hermit::FitConfig base;
      base.seed = tune_args.seed;
      const auto res = hermit::tune(train, valid, grid, base, tune_args.jobs);

      hermit::save_model((dir / "model.json").string(), res.model,
                         res.gate ? &*res.gate : nullptr);
      hermit::write_json_file((dir / "report.json").string(),
                              hermit::fit_report_to_json(res.report));
      write_trace_csv(dir / "trace.csv", res.report);
      std::ofstream table(dir / "grid.csv");
      table << "kind,k,lambda,lambda2,ok,valid_ll,converged,n_outer,error\n";
      for (const auto& cell : res.table)
        table << (cell.kind == hermit::PenaltyKind::Entrywise ? "lasso" : "group")
              << "," << cell.k << "," << cell.lambda << "," << cell.lambda2 << ","
              << cell.ok << "," << std::setprecision(17) << cell.valid_ll << ","
              << cell.converged << "," << cell.n_outer << "," << cell.error << "\n";
      std::cout << "best: k=" << res.best.k << " lambda=" << res.best.lambda
                << " valid_ll=" << res.best.valid_ll << "\n";
      return 0;
    }

    if (cmd_impute->parsed()) {
      const hermit::Dataset test = load_data(imp.test);
      const hermit::MixtureModel model = hermit::load_model(imp.model);
      const fs::path dir = ensure_out_dir(imp.out);
      if (imp.hide_fraction > 0.0) {
        const auto pm =
            hermit::impute_benchmark(model, test, imp.hide_fraction, imp.seed);
        hermit::write_json_file((dir / "metrics.json").string(), metrics_json(pm));
        std::cout << metrics_json(pm).dump(2) << "\n";
      } else {
        const Eigen::MatrixXd filled = hermit::impute(model, test);
        std::string header;
        for (int j = 0; j < test.m(); ++j)
          header += (j ? ",y" : "y") + std::to_string(j);
        write_matrix_csv(dir / "imputed.csv", filled, header);
        std::cout << "wrote " << (dir / "imputed.csv").string() << "\n";
      }
      return 0;
    }

    if (cmd_predict->parsed()) {
      const hermit::Dataset test = load_data(pred_args.test);
      std::optional<hermit::GatingModel> gate;
      const hermit::MixtureModel model = hermit::load_model(pred_args.model, &gate);
      const fs::path dir = ensure_out_dir(pred_args.out);
      const Eigen::MatrixXd out = gate ? hermit::predict_moe(model, *gate, test.X)
                                       : hermit::predict(model, test.X);
      std::string header;
      for (int j = 0; j < test.m(); ++j) header += (j ? ",y" : "y") + std::to_string(j);
      write_matrix_csv(dir / "predictions.csv", out, header);
      std::cout << "wrote " << (dir / "predictions.csv").string() << "\n";
      return 0;
    }

    if (cmd_scores->parsed()) {
      const hermit::Dataset train = load_data(score_args.train);
      const hermit::MixtureModel model = hermit::load_model(score_args.model);
      const fs::path dir = ensure_out_dir(score_args.out);
      const auto scores = hermit::concordant_scores(model, train);
      std::vector<double> present;
      std::ofstream out(dir / "scores.csv");
      out << "task,score\n";
      for (size_t h = 0; h < scores.size(); ++h) {
        out << h << ",";
        if (scores[h]) {
          out << std::setprecision(17) << *scores[h];
          present.push_back(*scores[h]);
        }
        out << "\n";
      }
      const auto cut = hermit::two_means_split(present);
      json j;
      if (cut) j["suggested_threshold"] = *cut;
      hermit::write_json_file((dir / "threshold.json").string(), j);
      std::cout << "wrote " << (dir / "scores.csv").string() << "\n";
      return 0;
    }

    if (cmd_cluster->parsed()) {
      const hermit::Dataset train = load_data(cl.train);
      const hermit::Dataset valid =
          hermit::read_dataset_csv(cl.valid_csv, cl.train.tasks);
      const fs::path dir = ensure_out_dir(cl.out);

      hermit::TaskSimilarityConfig cfg;
      cfg.per_task_k = cl.per_task_k;
      cfg.fit.seed = cl.seed;
      cfg.jobs = cl.jobs;
      if (!cl.lambdas.empty()) cfg.lambda_grid = parse_grid(cl.lambdas);
      const auto sim_result = hermit::task_similarity(train, valid, cfg);
      const Eigen::MatrixXd emb = hermit::kernel_pca(sim_result, cl.dims);
      const auto labels = hermit::cluster_tasks(emb, cl.groups, cl.seed);

      std::string sim_header;
      for (int j = 0; j < train.m(); ++j)
        sim_header += (j ? ",t" : "t") + std::to_string(j);
      write_matrix_csv(dir / "similarity.csv", sim_result.matrix, sim_header);
      std::ofstream out(dir / "clusters.csv");
      out << "task,label";
      for (int c = 0; c < cl.dims; ++c) out << ",dim" << c;
      out << "\n";
      for (int h = 0; h < train.m(); ++h) {
        out << h << "," << labels[h];
        for (int c = 0; c < cl.dims; ++c)
          out << "," << std::setprecision(17) << emb(h, c);
        out << "\n";
      }
      for (const auto& w : sim_result.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << "wrote " << (dir / "clusters.csv").string() << "\n";
      return 0;
    }

    if (cmd_outliers->parsed()) {
      const hermit::Dataset train = load_data(outl.train);
      const fs::path dir = ensure_out_dir(outl.out);
      hermit::PenaltyConfig pen;
      pen.kind = parse_penalty(outl.penalty);
      pen.lambda = outl.lambda;
      pen.gamma = outl.gamma;
      hermit::RobustConfig rc;
      rc.lambda2 = outl.lambda2;
      rc.base.k = outl.k;
      rc.base.seed = outl.seed;

      Eigen::VectorXd scores;
      if (outl.p_clean.has_value()) {
        rc.p_clean = *outl.p_clean;
        const auto ts = hermit::two_stage(train, pen, rc);
        scores = ts.scores;
        hermit::save_model((dir / "model.json").string(), ts.model);
        std::ofstream kept(dir / "kept_rows.csv"), removed(dir / "removed_rows.csv");
        kept << "row\n";
        for (int i : ts.kept_rows) kept << i << "\n";
        removed << "row\n";
        for (int i : ts.removed_rows) removed << i << "\n";
      } else {
        const auto res = hermit::fit_robust(train, pen, rc);
        scores = hermit::outlier_scores(res.model.zeta);
        hermit::save_model((dir / "model.json").string(), res.model);
      }
      std::ofstream out(dir / "outlier_scores.csv");
      out << "row,score\n";
      for (int i = 0; i < scores.size(); ++i)
        out << i << "," << std::setprecision(17) << scores(i) << "\n";
      std::cout << "wrote " << (dir / "outlier_scores.csv").string() << "\n";
      return 0;
    }

    if (cmd_eval->parsed()) {
      const hermit::Dataset truth = hermit::read_dataset_csv(ev.truth_csv, ev.tasks);
      const Eigen::MatrixXd pred = hermit::read_matrix_csv(ev.pred_csv);
      if (pred.rows() != truth.n() || pred.cols() != truth.m())
        throw CLI::ValidationError(
            "prediction matrix must be n x m (targets only)");
      const fs::path dir = ensure_out_dir(ev.out);
      const hermit::BoolMask pred_present =
          pred.array().unaryExpr([](double v) { return !std::isnan(v); });
      const hermit::BoolMask mask = truth.observed && pred_present;
      const auto pm = hermit::prediction_metrics(pred, truth, mask);
      hermit::write_json_file((dir / "metrics.json").string(), metrics_json(pm));
      std::cout << metrics_json(pm).dump(2) << "\n";
      return 0;
    }

    if (cmd_rep->parsed()) {
      hermit::ProtocolOptions options;
      options.replications = rep.replications;
      options.keep_fraction = rep.keep;
      options.seed = rep.seed;
      options.jobs = rep.jobs;
      if (!rep.lambdas.empty()) options.lambda_grid = parse_grid(rep.lambdas);
      if (!rep.lambda2s.empty()) options.lambda2_grid = parse_grid(rep.lambda2s);
      const auto result = hermit::run_protocol(rep.protocol, options);
      const fs::path dir = ensure_out_dir(rep.out);

      std::ofstream runs(dir / "runs.csv");
      runs << "run,metric,value\n";
      for (size_t r = 0; r < result.runs.size(); ++r)
        for (const auto& [key, value] : result.runs[r].metrics)
          runs << r << "," << key << "," << std::setprecision(17) << value << "\n";

      const auto agg = hermit::aggregate_best(result, options.keep_fraction);
      json j;
      for (const auto& [key, a] : agg)
        j[key] = {{"mean", a.mean}, {"stddev", a.stddev}, {"count", a.count}};
      hermit::write_json_file((dir / "aggregate.json").string(), j);
      std::cout << j.dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
