#include "hermit/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace hermit {

using nlohmann::json;

namespace {

std::string format_value(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  out.push_back(cell);
  return out;
}

bool is_missing_cell(const std::string& cell) {
  if (cell.empty()) return true;
  std::string lower;
  for (char c : cell) lower += static_cast<char>(std::tolower(c));
  return lower == "nan";
}

json matrix_to_json(const Eigen::MatrixXd& mat) {
  json rows = json::array();
  for (int i = 0; i < mat.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < mat.cols(); ++j) row.push_back(mat(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("expected a 2-D json array");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Eigen::MatrixXd mat(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[i].size()) != cols)
      throw std::invalid_argument("ragged json matrix");
    for (int c = 0; c < cols; ++c) mat(i, c) = j[i][c].get<double>();
  }
  return mat;
}

}  // namespace

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

void write_dataset_csv(const std::string& csv_path, const Dataset& data) {
  std::ofstream out(csv_path);
  if (!out) throw std::runtime_error("cannot write " + csv_path);
  for (int j = 0; j < data.d(); ++j) out << (j ? "," : "") << "x" << j;
  for (int j = 0; j < data.m(); ++j) out << ",y" << j;
  out << "\n";
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < data.d(); ++j)
      out << (j ? "," : "") << format_value(data.X(i, j));
    for (int j = 0; j < data.m(); ++j) {
      out << ",";
      if (data.observed(i, j)) out << format_value(data.Y(i, j));
    }
    out << "\n";
  }
}

void write_tasks_json(const std::string& path, const Dataset& data) {
  json j;
  j["num_features"] = data.d();
  json fams = json::array();
  for (const auto& f : data.tasks) fams.push_back(family_to_string(f));
  j["families"] = std::move(fams);
  bool any_disp = false;
  for (const auto& f : data.tasks) any_disp = any_disp || f.dispersion != 1.0;
  if (any_disp) {
    json disp = json::array();
    for (const auto& f : data.tasks) disp.push_back(f.dispersion);
    j["dispersions"] = std::move(disp);
  }
  write_json_file(path, j);
}

Dataset read_dataset_csv(const std::string& csv_path, const std::string& tasks_json_path) {
  const json sidecar = load_json_file(tasks_json_path);
  const int d = sidecar.at("num_features").get<int>();
  std::vector<Family> tasks;
  for (const auto& name : sidecar.at("families"))
    tasks.push_back(family_from_string(name.get<std::string>()));
  if (sidecar.contains("dispersions")) {
    const auto& disp = sidecar["dispersions"];
    if (disp.size() != tasks.size())
      throw std::invalid_argument("dispersions length != families length");
    for (size_t j = 0; j < tasks.size(); ++j)
      tasks[j] = make_family(tasks[j].kind, disp[j].get<double>());
  }
  const int m = static_cast<int>(tasks.size());

  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open " + csv_path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv " + csv_path);
  const auto header = split_csv_line(line);
  if (static_cast<int>(header.size()) != d + m)
    throw std::invalid_argument("csv column count != num_features + families");

  std::vector<std::vector<std::string>> raw;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != d + m)
      throw std::invalid_argument("csv row width mismatch");
    raw.push_back(std::move(cells));
  }
  const int n = static_cast<int>(raw.size());
  if (n == 0) throw std::invalid_argument("csv has no data rows");

  Eigen::MatrixXd X(n, d), Y(n, m);
  BoolMask obs(n, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) X(i, j) = std::stod(raw[i][j]);
    for (int j = 0; j < m; ++j) {
      const std::string& cell = raw[i][d + j];
      if (is_missing_cell(cell)) {
        obs(i, j) = false;
        Y(i, j) = std::numeric_limits<double>::quiet_NaN();
      } else {
        obs(i, j) = true;
        Y(i, j) = std::stod(cell);
      }
    }
  }
  return Dataset(std::move(X), std::move(Y), std::move(obs), std::move(tasks));
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv " + path);
  const int cols = static_cast<int>(split_csv_line(line).size());
  std::vector<std::vector<std::string>> raw;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != cols)
      throw std::invalid_argument("csv row width mismatch");
    raw.push_back(std::move(cells));
  }
  Eigen::MatrixXd mat(raw.size(), cols);
  for (size_t i = 0; i < raw.size(); ++i)
    for (int j = 0; j < cols; ++j)
      mat(static_cast<int>(i), j) = is_missing_cell(raw[i][j])
                                        ? std::numeric_limits<double>::quiet_NaN()
                                        : std::stod(raw[i][j]);
  return mat;
}

json model_to_json(const MixtureModel& model, const GatingModel* gate) {
  json j;
  json beta = json::array();
  for (const auto& slice : model.beta) beta.push_back(matrix_to_json(slice));
  j["beta"] = std::move(beta);
  json pi = json::array();
  for (int r = 0; r < model.pi.size(); ++r) pi.push_back(model.pi(r));
  j["pi"] = std::move(pi);
  json fams = json::array();
  for (const auto& f : model.families) fams.push_back(family_to_string(f));
  j["families"] = std::move(fams);
  j["gamma"] = model.gamma;
  bool any_disp = false;
  for (const auto& f : model.families) any_disp = any_disp || f.dispersion != 1.0;
  if (any_disp) {
    json disp = json::array();
    for (const auto& f : model.families) disp.push_back(f.dispersion);
    j["dispersions"] = std::move(disp);
  }
  if (model.has_zeta()) {
    json zeta = json::array();
    for (const auto& slice : model.zeta) zeta.push_back(matrix_to_json(slice));
    j["zeta"] = std::move(zeta);
  }
  if (gate) j["alpha"] = matrix_to_json(gate->alpha);
  return j;
}

MixtureModel model_from_json(const json& j, std::optional<GatingModel>* gate_out) {
  MixtureModel model;
  for (const auto& slice : j.at("beta")) model.beta.push_back(matrix_from_json(slice));
  const auto& pi = j.at("pi");
  model.pi.resize(pi.size());
  for (size_t r = 0; r < pi.size(); ++r) model.pi(static_cast<int>(r)) = pi[r].get<double>();
  for (const auto& name : j.at("families"))
    model.families.push_back(family_from_string(name.get<std::string>()));
  if (j.contains("dispersions")) {
    const auto& disp = j["dispersions"];
    for (size_t t = 0; t < model.families.size(); ++t)
      model.families[t] = make_family(model.families[t].kind, disp[t].get<double>());
  }
  model.gamma = j.at("gamma").get<double>();
  if (j.contains("zeta"))
    for (const auto& slice : j["zeta"]) model.zeta.push_back(matrix_from_json(slice));
  if (gate_out) {
    if (j.contains("alpha"))
      *gate_out = GatingModel{matrix_from_json(j["alpha"])};
    else
      gate_out->reset();
  }
  return model;
}

void save_model(const std::string& path, const MixtureModel& model,
                const GatingModel* gate) {
  write_json_file(path, model_to_json(model, gate));
}

MixtureModel load_model(const std::string& path, std::optional<GatingModel>* gate_out) {
  return model_from_json(load_json_file(path), gate_out);
}

PenaltyConfig penalty_config_from_json(const json& j) {
  PenaltyConfig cfg;
  if (j.contains("kind")) {
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "lasso" || kind == "entrywise")
      cfg.kind = PenaltyKind::Entrywise;
    else if (kind == "group" || kind == "row_group")
      cfg.kind = PenaltyKind::RowGroup;
    else
      throw std::invalid_argument("unknown penalty kind: " + kind);
  }
  if (j.contains("lambda")) cfg.lambda = j["lambda"].get<double>();
  if (j.contains("gamma")) cfg.gamma = j["gamma"].get<double>();
  if (j.contains("exempt_intercept")) cfg.exempt_intercept = j["exempt_intercept"].get<bool>();
  if (cfg.lambda < 0) throw std::invalid_argument("lambda must be >= 0");
  return cfg;
}

json penalty_config_to_json(const PenaltyConfig& cfg) {
  json j;
  j["kind"] = cfg.kind == PenaltyKind::Entrywise ? "lasso" : "group";
  j["lambda"] = cfg.lambda;
  j["gamma"] = cfg.gamma;
  j["exempt_intercept"] = cfg.exempt_intercept;
  return j;
}

FitConfig fit_config_from_json(const json& j) {
  FitConfig cfg;
  if (j.contains("k")) cfg.k = j["k"].get<int>();
  if (j.contains("t_out")) cfg.t_out = j["t_out"].get<int>();
  if (j.contains("t_in")) cfg.t_in = j["t_in"].get<int>();
  if (j.contains("tol_obj")) cfg.tol_obj = j["tol_obj"].get<double>();
  if (j.contains("tol_param")) cfg.tol_param = j["tol_param"].get<double>();
  if (j.contains("tol_inner")) cfg.tol_inner = j["tol_inner"].get<double>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("use_active_set")) cfg.use_active_set = j["use_active_set"].get<bool>();
  return cfg;
}

json fit_report_to_json(const FitReport& report) {
  json j;
  j["objective_trace"] = report.objective_trace;
  j["n_outer"] = report.n_outer;
  j["converged"] = report.converged;
  j["inner_iterations"] = report.inner_iterations;
  j["warnings"] = report.warnings;
  return j;
}

SynthSpec synth_spec_from_json(const json& j) {
  SynthSpec spec;
  if (j.contains("n")) spec.n = j["n"].get<int>();
  if (j.contains("d")) spec.d = j["d"].get<int>();
  if (j.contains("m_gaussian")) spec.m_gaussian = j["m_gaussian"].get<int>();
  if (j.contains("m_bernoulli")) spec.m_bernoulli = j["m_bernoulli"].get<int>();
  if (j.contains("m_poisson")) spec.m_poisson = j["m_poisson"].get<int>();
  if (j.contains("k_true")) spec.k_true = j["k_true"].get<int>();
  if (j.contains("sparsity")) spec.sparsity = j["sparsity"].get<int>();
  if (j.contains("coef_range")) {
    spec.coef_range = {j["coef_range"][0].get<double>(), j["coef_range"][1].get<double>()};
  }
  if (j.contains("poisson_coef_range")) {
    spec.poisson_coef_range = {j["poisson_coef_range"][0].get<double>(),
                               j["poisson_coef_range"][1].get<double>()};
  }
  if (j.contains("bias")) spec.bias = j["bias"].get<double>();
  if (j.contains("poisson_bias")) spec.poisson_bias = j["poisson_bias"].get<double>();
  if (j.contains("pi_true")) {
    const auto& arr = j["pi_true"];
    spec.pi_true.resize(arr.size());
    for (size_t r = 0; r < arr.size(); ++r)
      spec.pi_true(static_cast<int>(r)) = arr[r].get<double>();
  }
  if (j.contains("missing_rate")) spec.missing_rate = j["missing_rate"].get<double>();
  if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
  return spec;
}

json ground_truth_to_json(const GroundTruth& truth) {
  json j;
  json beta = json::array();
  for (const auto& slice : truth.beta) beta.push_back(matrix_to_json(slice));
  j["beta"] = std::move(beta);
  j["delta"] = truth.delta;
  if (truth.alpha.size() != 0) j["alpha"] = matrix_to_json(truth.alpha);
  return j;
}

}  // namespace hermit
