#include "twoarm/io.hpp"

#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace twoarm::io {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string f_mode_name(FMode m) { return m == FMode::Identity ? "identity" : "zero"; }
FMode f_mode_from(const std::string& s) {
  if (s == "identity") return FMode::Identity;
  if (s == "zero") return FMode::Zero;
  throw std::invalid_argument("unknown f_mode: " + s);
}

std::string pb_solver_name(PbSolver s) { return s == PbSolver::Brute ? "brute" : "greedy"; }
PbSolver pb_solver_from(const std::string& s) {
  if (s == "brute") return PbSolver::Brute;
  if (s == "greedy") return PbSolver::Greedy;
  throw std::invalid_argument("unknown pb_solver: " + s);
}

bool parse_double(const std::string& token, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(token, &pos);
    while (pos < token.size() && std::isspace(static_cast<unsigned char>(token[pos]))) ++pos;
    return pos == token.size();
  } catch (const std::exception&) {
    return false;
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream is(line);
  while (std::getline(is, token, ',')) out.push_back(token);
  return out;
}

}  // namespace

std::string matrix_to_csv(const Eigen::Ref<const MatrixXd>& m) {
  std::ostringstream os;
  for (Index j = 0; j < m.cols(); ++j) {
    os << (j ? "," : "") << j;
  }
  os << "\n";
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      os << (j ? "," : "") << fmt(m(i, j));
    }
    os << "\n";
  }
  return os.str();
}

json matrix_to_json(const Eigen::Ref<const MatrixXd>& m) {
  json data = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    data.push_back(std::move(row));
  }
  return json{{"n", m.rows()}, {"data", std::move(data)}};
}

MatrixXd matrix_from_json(const json& j) {
  const json& data = j.is_object() ? j.at("data") : j;
  if (!data.is_array() || data.empty()) {
    throw std::invalid_argument("matrix JSON: expected a nonempty array");
  }
  const Index rows = static_cast<Index>(data.size());
  const Index cols = data[0].is_array() ? static_cast<Index>(data[0].size()) : 1;
  MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = data[static_cast<std::size_t>(i)];
    if (row.is_array()) {
      if (static_cast<Index>(row.size()) != cols) {
        throw std::invalid_argument("matrix JSON: ragged rows");
      }
      for (Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
    } else {
      m(i, 0) = row.get<double>();
    }
  }
  return m;
}

json allocation_to_json(const Allocation& w) {
  json arr = json::array();
  for (Index i = 0; i < w.size(); ++i) arr.push_back(w.signs()[i]);
  return arr;
}

Allocation allocation_from_json(const json& j) {
  VectorXi w(static_cast<Index>(j.size()));
  for (Index i = 0; i < w.size(); ++i) w[i] = j[static_cast<std::size_t>(i)].get<int>();
  return Allocation(std::move(w));
}

json pairset_to_json(const PairSet& p) {
  json arr = json::array();
  for (const auto& [i, j] : p.pairs()) arr.push_back(json::array({i, j}));
  return arr;
}

json design_to_json(const DesignDistribution& d) {
  json j{{"kind", to_string(d.kind)}, {"n", d.n},
         {"explicit", d.has_explicit_support()}};
  if (d.has_explicit_support()) {
    json allocations = json::array();
    for (const Allocation& w : d.support) allocations.push_back(allocation_to_json(w));
    j["allocations"] = std::move(allocations);
    json probs = json::array();
    for (Index i = 0; i < d.probs.size(); ++i) probs.push_back(d.probs[i]);
    j["probs"] = std::move(probs);
  }
  if (!d.pairs.empty()) {
    json pairs = json::array();
    for (const auto& [a, b] : d.pairs) pairs.push_back(json::array({a, b}));
    j["pairs"] = std::move(pairs);
  }
  return j;
}

json report_to_json(const CriterionReport& r) {
  json j{{"B1", r.B1},
         {"B2", r.B2},
         {"R", r.R},
         {"lambda_max", r.lambda_max},
         {"mean_mse", r.mean_mse},
         {"var_mse", r.var_mse},
         {"Q", r.Q},
         {"c_used", r.c_used}};
  if (r.has_mc_quantile) j["mc_quantile"] = r.mc_quantile;
  return j;
}

json scenario_config_to_json(const ScenarioConfig& cfg) {
  json designs = json::array();
  for (DesignKind k : cfg.designs) designs.push_back(to_string(k));
  // threads is an execution knob, not part of the scenario identity; results
  // must not depend on it.
  return json{{"name", cfg.name},
              {"n", cfg.n},
              {"beta_T", cfg.beta_T},
              {"f_mode", f_mode_name(cfg.f_mode)},
              {"sigma_z", cfg.sigma_z},
              {"n_z_draws", cfg.n_z_draws},
              {"n_w_draws", cfg.n_w_draws},
              {"q", cfg.q},
              {"seed", cfg.seed},
              {"designs", std::move(designs)},
              {"pb_solver", pb_solver_name(cfg.pb_solver)},
              {"greedy_restarts", cfg.greedy_restarts},
              {"pb_imbalance_ceiling", cfg.pb_imbalance_ceiling},
              {"mc_exact", cfg.mc_mode == McMode::Exact}};
}

ScenarioConfig scenario_config_from_json(const json& j) {
  ScenarioConfig cfg;
  cfg.name = j.value("name", std::string("custom"));
  cfg.n = j.at("n").get<Index>();
  cfg.beta_T = j.value("beta_T", 1.0);
  cfg.f_mode = f_mode_from(j.value("f_mode", std::string("identity")));
  cfg.sigma_z = j.at("sigma_z").get<double>();
  cfg.n_z_draws = j.value("n_z_draws", 2000);
  cfg.n_w_draws = j.value("n_w_draws", 300);
  cfg.q = j.value("q", 0.95);
  cfg.seed = j.value("seed", std::uint64_t{1});
  if (j.contains("designs")) {
    cfg.designs.clear();
    for (const auto& d : j.at("designs")) {
      cfg.designs.push_back(design_kind_from_string(d.get<std::string>()));
    }
  }
  cfg.pb_solver = pb_solver_from(j.value("pb_solver", std::string("brute")));
  cfg.greedy_restarts = j.value("greedy_restarts", 20000);
  cfg.pb_imbalance_ceiling = j.value("pb_imbalance_ceiling", 1e-14);
  cfg.mc_mode = j.value("mc_exact", false) ? McMode::Exact : McMode::Empirical;
  return cfg;
}

json scenario_result_to_json(const ScenarioResult& r) {
  json x = json::array();
  for (Index i = 0; i < r.x.size(); ++i) x.push_back(r.x[i]);

  json summaries = json::array();
  for (const DesignSummary& s : r.summaries) {
    summaries.push_back(json{{"design", s.design},
                             {"mean", s.mean},
                             {"quantile", s.quantile},
                             {"max", s.max},
                             {"realized_c", s.realized_c}});
  }

  json samples = json::object();
  for (std::size_t k = 0; k < r.designs.size(); ++k) {
    json arr = json::array();
    const VectorXd& v = r.mse_samples[k];
    for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    samples[r.designs[k]] = std::move(arr);
  }

  json j{{"config", scenario_config_to_json(r.config)},
         {"x", std::move(x)},
         {"designs", r.designs},
         {"summaries", std::move(summaries)},
         {"mse_samples", std::move(samples)},
         {"warnings", r.warnings}};
  if (r.w_star.has_value()) {
    j["w_star"] = allocation_to_json(*r.w_star);
    j["w_star_imbalance"] = r.w_star_imbalance;
  }
  return j;
}

ScenarioResult scenario_result_from_json(const json& j) {
  ScenarioResult r;
  r.config = scenario_config_from_json(j.at("config"));
  const json& x = j.at("x");
  r.x.resize(static_cast<Index>(x.size()));
  for (Index i = 0; i < r.x.size(); ++i) r.x[i] = x[static_cast<std::size_t>(i)].get<double>();
  r.designs = j.at("designs").get<std::vector<std::string>>();
  for (const std::string& name : r.designs) {
    const json& arr = j.at("mse_samples").at(name);
    VectorXd v(static_cast<Index>(arr.size()));
    for (Index i = 0; i < v.size(); ++i) v[i] = arr[static_cast<std::size_t>(i)].get<double>();
    r.mse_samples.push_back(std::move(v));
  }
  for (const auto& s : j.at("summaries")) {
    DesignSummary sum;
    sum.design = s.at("design").get<std::string>();
    sum.mean = s.at("mean").get<double>();
    sum.quantile = s.at("quantile").get<double>();
    sum.max = s.at("max").get<double>();
    sum.realized_c = s.at("realized_c").get<double>();
    r.summaries.push_back(std::move(sum));
  }
  if (j.contains("w_star")) {
    r.w_star = allocation_from_json(j.at("w_star"));
    r.w_star_imbalance = j.value("w_star_imbalance", 0.0);
  }
  if (j.contains("warnings")) {
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
  }
  return r;
}

std::string density_to_csv(const std::vector<DensityRow>& rows) {
  std::ostringstream os;
  os << "design,bin_left,bin_right,density,mean,quantile\n";
  for (const DensityRow& r : rows) {
    os << r.design << "," << fmt(r.bin_left) << "," << fmt(r.bin_right) << ","
       << fmt(r.density) << "," << fmt(r.mean) << "," << fmt(r.quantile) << "\n";
  }
  return os.str();
}

std::string mse_samples_to_csv(const Eigen::Ref<const VectorXd>& samples) {
  std::ostringstream os;
  os << "draw_index,mse\n";
  for (Index i = 0; i < samples.size(); ++i) {
    os << i << "," << fmt(samples[i]) << "\n";
  }
  return os.str();
}

std::string summary_to_csv(const std::vector<DesignSummary>& summaries) {
  std::ostringstream os;
  os << "design,mean,quantile,max,realized_c\n";
  for (const DesignSummary& s : summaries) {
    os << s.design << "," << fmt(s.mean) << "," << fmt(s.quantile) << ","
       << fmt(s.max) << "," << fmt(s.realized_c) << "\n";
  }
  return os.str();
}

CovariateMatrix load_covariates(const std::string& path) {
  const std::string content = read_file(path);
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    return CovariateMatrix(matrix_from_json(json::parse(content)));
  }

  std::vector<std::vector<double>> rows;
  std::istringstream is(content);
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> tokens = split_csv_line(line);
    std::vector<double> row;
    row.reserve(tokens.size());
    bool numeric = true;
    for (const std::string& t : tokens) {
      double v = 0.0;
      if (!parse_double(t, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;  // header row
      }
      throw std::invalid_argument("covariate CSV: non-numeric value in " + path);
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::invalid_argument("covariate CSV: ragged rows in " + path);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("covariate CSV: no data in " + path);
  MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return CovariateMatrix(std::move(m));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << content;
}

}  // namespace twoarm::io
