#include "tcmv/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "tcmv/config_file.hpp"

namespace tcmv {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string fmt(double v, const char* spec = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

ordered_json to_json(const Eigen::VectorXd& v) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from(const ordered_json& arr) {
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v[i] = arr[i].get<double>();
  return v;
}

ordered_json load_json(const std::string& path, const char* expected_format) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("failed to parse '" + path + "': " + e.what());
  }
  if (!j.is_object() || j.value("format", "") != expected_format)
    throw ConfigError("'" + path + "' is not a " + std::string(expected_format) + " file");
  return j;
}

void dump_json(const std::string& path, const ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace

void write_policy_json(const std::string& path, const PolicyTable& policy,
                       const PolicyMeta& meta) {
  ordered_json j;
  j["format"] = "tcmv.policy.v1";
  j["horizon"] = policy.horizon;
  j["assets"] = policy.assets;
  j["target"] = policy.target;
  j["x0"] = meta.x0;
  j["riskfree"] = to_json(policy.riskfree);
  j["discount"] = to_json(policy.curve.rho_inv);
  j["gamma_plus"] = to_json(meta.gamma_plus);
  j["gamma_minus"] = to_json(meta.gamma_minus);
  j["constrained"] = policy.constrained;
  if (policy.constrained && policy.cone) {
    ordered_json cone;
    cone["name"] = policy.cone->name;
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < policy.cone->A.rows(); ++i)
      rows.push_back(to_json(policy.cone->A.row(i).transpose()));
    cone["rows"] = rows;
    j["cone"] = cone;
  }
  ordered_json kp = ordered_json::array(), km = ordered_json::array();
  for (int t = 0; t < policy.horizon; ++t) {
    kp.push_back(to_json(policy.K_plus[t]));
    km.push_back(to_json(policy.K_minus[t]));
  }
  j["K_plus"] = kp;
  j["K_minus"] = km;
  dump_json(path, j);
}

LoadedPolicy read_policy_json(const std::string& path) {
  const ordered_json j = load_json(path, "tcmv.policy.v1");
  LoadedPolicy out;
  try {
    out.policy.horizon = j.at("horizon").get<int>();
    out.policy.assets = j.at("assets").get<int>();
    out.policy.target = j.at("target").get<double>();
    out.meta.x0 = j.value("x0", 1.0);
    out.policy.riskfree = vector_from(j.at("riskfree"));
    out.meta.gamma_plus = vector_from(j.at("gamma_plus"));
    out.meta.gamma_minus = vector_from(j.at("gamma_minus"));
    out.policy.curve = discount_curve(out.policy.riskfree);
    out.policy.constrained = j.at("constrained").get<bool>();
    if (out.policy.constrained) {
      const auto& cone = j.at("cone");
      const auto& rows = cone.at("rows");
      Eigen::MatrixXd A(rows.size(), out.policy.assets);
      for (std::size_t i = 0; i < rows.size(); ++i)
        A.row(i) = vector_from(rows[i]).transpose();
      out.policy.cone = ConeConstraint::from_rows(std::move(A), cone.value("name", "custom"));
    }
    const auto& kp = j.at("K_plus");
    const auto& km = j.at("K_minus");
    if (static_cast<int>(kp.size()) != out.policy.horizon ||
        static_cast<int>(km.size()) != out.policy.horizon)
      throw ConfigError("policy file '" + path + "': fund table length mismatch");
    for (const auto* arr : {&kp, &km}) {
      for (const auto& row : *arr)
        if (static_cast<int>(row.size()) != out.policy.assets)
          throw ConfigError("policy file '" + path + "': fund vector dimension mismatch");
    }
    out.policy.K_plus.resize(out.policy.horizon);
    out.policy.K_minus.resize(out.policy.horizon);
    for (int t = 0; t < out.policy.horizon; ++t) {
      out.policy.K_plus[t] = vector_from(kp[t]);
      out.policy.K_minus[t] = vector_from(km[t]);
    }
  } catch (const ordered_json::exception& e) {
    throw ConfigError("policy file '" + path + "' is malformed: " + e.what());
  }
  return out;
}

void write_coefficients_json(const std::string& path, const CoefficientTable& coeffs) {
  ordered_json j;
  j["format"] = "tcmv.coefficients.v1";
  j["horizon"] = coeffs.horizon();
  j["a_plus"] = to_json(coeffs.a_plus);
  j["a_minus"] = to_json(coeffs.a_minus);
  j["b_plus"] = to_json(coeffs.b_plus);
  j["b_minus"] = to_json(coeffs.b_minus);
  j["validity_margin"] = coeffs.validity_margin();
  dump_json(path, j);
}

CoefficientTable read_coefficients_json(const std::string& path) {
  const ordered_json j = load_json(path, "tcmv.coefficients.v1");
  CoefficientTable out;
  try {
    out.a_plus = vector_from(j.at("a_plus"));
    out.a_minus = vector_from(j.at("a_minus"));
    out.b_plus = vector_from(j.at("b_plus"));
    out.b_minus = vector_from(j.at("b_minus"));
  } catch (const ordered_json::exception& e) {
    throw ConfigError("coefficients file '" + path + "' is malformed: " + e.what());
  }
  return out;
}

void write_diagnostics_json(const std::string& path,
                            const std::vector<StageDiagnostics>& stages) {
  ordered_json j;
  j["format"] = "tcmv.diagnostics.v1";
  ordered_json arr = ordered_json::array();
  long total = 0;
  double margin = std::numeric_limits<double>::infinity();
  bool all_converged = true;
  for (const auto& d : stages) {
    ordered_json s;
    s["t"] = d.t;
    s["side"] = side_name(d.side);
    s["evaluations"] = d.evaluations;
    s["converged"] = d.converged;
    s["winner_seed"] = d.winner_seed;
    s["objective"] = d.objective;
    s["validity_margin"] = d.validity_margin;
    arr.push_back(std::move(s));
    total += d.evaluations;
    margin = std::min(margin, d.validity_margin);
    all_converged = all_converged && d.converged;
  }
  j["stages"] = arr;
  j["total_evaluations"] = total;
  j["validity_margin"] = margin;
  j["all_converged"] = all_converged;
  dump_json(path, j);
}

ClosedFormComparison compare_closed_form(const SimulationResult& result,
                                         const TerminalMoments& closed_form) {
  ClosedFormComparison cmp;
  cmp.closed_form = closed_form;
  const double se_mean = result.stderr_mean > 0.0 ? result.stderr_mean : 1e-300;
  const double se_var = result.stderr_variance > 0.0 ? result.stderr_variance : 1e-300;
  cmp.mean_gap_se = std::abs(result.mean - closed_form.mean) / se_mean;
  cmp.variance_gap_se = std::abs(result.variance - closed_form.variance) / se_var;
  if (result.variance == 0.0 && closed_form.variance == 0.0) {
    cmp.mean_gap_se = result.mean == closed_form.mean ? 0.0 : cmp.mean_gap_se;
    cmp.variance_gap_se = 0.0;
  }
  cmp.agrees_3se = cmp.mean_gap_se <= 3.0 && cmp.variance_gap_se <= 3.0;
  return cmp;
}

void write_summary_json(const std::string& path, const SimulationResult& result, double x0,
                        double target, const std::optional<ClosedFormComparison>& comparison,
                        const std::optional<Eigen::VectorXd>& threshold_probs) {
  ordered_json j;
  j["format"] = "tcmv.summary.v1";
  j["paths"] = result.n_paths;
  j["seed"] = result.seed;
  j["x0"] = x0;
  j["target"] = target;
  j["mean"] = result.mean;
  j["variance"] = result.variance;
  j["stderr_mean"] = result.stderr_mean;
  j["stderr_variance"] = result.stderr_variance;
  j["degenerate"] = result.degenerate;
  if (result.sharpe)
    j["sharpe"] = *result.sharpe;
  else
    j["sharpe"] = nullptr;
  j["sharpe_definition"] = "(E[X_T] - rho_0 * X_0) / std(X_T)";
  j["quantile_levels"] = to_json(result.quantile_levels);
  ordered_json q = ordered_json::array();
  for (Eigen::Index t = 0; t < result.quantiles.rows(); ++t)
    q.push_back(to_json(result.quantiles.row(t).transpose()));
  j["quantiles"] = q;
  if (threshold_probs) j["threshold_probabilities"] = to_json(*threshold_probs);
  if (comparison) {
    ordered_json c;
    c["mean"] = comparison->closed_form.mean;
    c["variance"] = comparison->closed_form.variance;
    c["mean_gap_se"] = comparison->mean_gap_se;
    c["variance_gap_se"] = comparison->variance_gap_se;
    c["agrees_3se"] = comparison->agrees_3se;
    j["closed_form"] = c;
  }
  dump_json(path, j);
}

void write_paths_csv(const std::string& path, const SimulationResult& result) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << "path";
  for (Eigen::Index t = 0; t < result.path_wealth.cols(); ++t) out << ",X" << (t + 1);
  out << '\n';
  for (Eigen::Index i = 0; i < result.path_wealth.rows(); ++i) {
    out << i;
    for (Eigen::Index t = 0; t < result.path_wealth.cols(); ++t)
      out << ',' << fmt(result.path_wealth(i, t));
    out << '\n';
  }
}

void write_density_csv(const std::string& path, const SimulationResult& result) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << "x,pdf\n";
  if (result.density) {
    for (Eigen::Index i = 0; i < result.density->x.size(); ++i)
      out << fmt(result.density->x[i]) << ',' << fmt(result.density->pdf[i]) << '\n';
  }
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw ConfigError("sweep has no rows");
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  const int T = rows.front().policy.horizon;
  const int n = rows.front().policy.assets;

  out << "gamma_plus,gamma_minus";
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < n; ++j) out << ",K_plus_" << t << '_' << j;
    for (int j = 0; j < n; ++j) out << ",K_minus_" << t << '_' << j;
    out << ",a_plus_" << t << ",a_minus_" << t << ",b_plus_" << t << ",b_minus_" << t;
  }
  out << ",sharpe\n";

  for (const auto& row : rows) {
    out << fmt(row.gamma_plus) << ',' << fmt(row.gamma_minus);
    for (int t = 0; t < T; ++t) {
      for (int j = 0; j < n; ++j) out << ',' << fmt(row.policy.K_plus[t][j]);
      for (int j = 0; j < n; ++j) out << ',' << fmt(row.policy.K_minus[t][j]);
      out << ',' << fmt(row.coeffs.a_plus[t]) << ',' << fmt(row.coeffs.a_minus[t]) << ','
          << fmt(row.coeffs.b_plus[t]) << ',' << fmt(row.coeffs.b_minus[t]);
    }
    out << ',' << (row.sharpe ? fmt(*row.sharpe) : "nan") << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  return out;
}

}  // namespace

std::vector<SweepRow> read_sweep_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("sweep file '" + path + "' is empty");
  const auto cols = split_csv(header);

  // Recover T and n from the column names.
  int T = 0, n = 0;
  for (const auto& c : cols) {
    if (c.rfind("a_plus_", 0) == 0) T = std::max(T, std::stoi(c.substr(7)) + 1);
    if (c.rfind("K_plus_0_", 0) == 0) n = std::max(n, std::stoi(c.substr(9)) + 1);
  }
  if (T == 0 || n == 0) throw ConfigError("sweep file '" + path + "' has no stage columns");

  std::vector<SweepRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    const auto fields = split_csv(line);
    if (fields.size() != cols.size())
      throw ConfigError("sweep file '" + path + "' has a ragged row");
    SweepRow row;
    std::size_t k = 0;
    row.gamma_plus = std::stod(fields[k++]);
    row.gamma_minus = std::stod(fields[k++]);
    row.policy.horizon = T;
    row.policy.assets = n;
    row.policy.K_plus.resize(T);
    row.policy.K_minus.resize(T);
    row.coeffs = CoefficientTable::zeros(T);
    for (int t = 0; t < T; ++t) {
      row.policy.K_plus[t].resize(n);
      row.policy.K_minus[t].resize(n);
      for (int j = 0; j < n; ++j) row.policy.K_plus[t][j] = std::stod(fields[k++]);
      for (int j = 0; j < n; ++j) row.policy.K_minus[t][j] = std::stod(fields[k++]);
      row.coeffs.a_plus[t] = std::stod(fields[k++]);
      row.coeffs.a_minus[t] = std::stod(fields[k++]);
      row.coeffs.b_plus[t] = std::stod(fields[k++]);
      row.coeffs.b_minus[t] = std::stod(fields[k++]);
    }
    const std::string sharpe = fields[k++];
    if (sharpe != "nan") row.sharpe = std::stod(sharpe);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("sweep file '" + path + "' has no data rows");
  return rows;
}

namespace {

std::string vec4(const Eigen::VectorXd& v) {
  std::ostringstream os;
  os << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << fmt(v[i], "%.4f");
  }
  os << ']';
  return os.str();
}

}  // namespace

std::vector<std::string> write_report(const std::string& artifacts_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(artifacts_dir);
  std::vector<SweepRow> rows;

  if (fs::exists(dir / "sweep.csv")) {
    rows = read_sweep_csv((dir / "sweep.csv").string());
  } else if (fs::exists(dir / "policy.json") && fs::exists(dir / "coefficients.json")) {
    const LoadedPolicy loaded = read_policy_json((dir / "policy.json").string());
    SweepRow row;
    row.gamma_plus = loaded.meta.gamma_plus.size() ? loaded.meta.gamma_plus[0] : 0.0;
    row.gamma_minus = loaded.meta.gamma_minus.size() ? loaded.meta.gamma_minus[0] : 0.0;
    row.policy = loaded.policy;
    row.coeffs = read_coefficients_json((dir / "coefficients.json").string());
    rows.push_back(std::move(row));
  } else {
    throw ConfigError("no sweep.csv or policy.json/coefficients.json in '" + artifacts_dir + "'");
  }

  const int T = rows.front().policy.horizon;
  std::ostringstream text;
  std::ostringstream csv;
  csv << "t,gamma_plus,gamma_minus";
  const int n = rows.front().policy.assets;
  for (int j = 0; j < n; ++j) csv << ",K_plus_" << j;
  for (int j = 0; j < n; ++j) csv << ",K_minus_" << j;
  csv << ",a_plus,a_minus,b_plus,b_minus\n";

  text << "Optimal investment funds and recursion parameters\n";
  for (int t = T - 1; t >= 0; --t) {
    text << "\nstage t=" << t << '\n';
    text << "g+      g-      K_plus";
    text << std::string(std::max(1, 10 * n - 6), ' ') << "K_minus";
    text << std::string(std::max(1, 10 * n - 7), ' ') << "a_plus    a_minus   b_plus    b_minus\n";
    for (const auto& row : rows) {
      std::ostringstream line;
      line << fmt(row.gamma_plus, "%-8.4g") << fmt(row.gamma_minus, "%-8.4g");
      std::string kp = vec4(row.policy.K_plus[t]);
      std::string km = vec4(row.policy.K_minus[t]);
      kp.resize(std::max<std::size_t>(kp.size() + 2, 10 * n), ' ');
      km.resize(std::max<std::size_t>(km.size() + 2, 10 * n), ' ');
      line << kp << km;
      line << fmt(row.coeffs.a_plus[t], "%-10.4f") << fmt(row.coeffs.a_minus[t], "%-10.4f")
           << fmt(row.coeffs.b_plus[t], "%-10.4f") << fmt(row.coeffs.b_minus[t], "%-10.4f");
      text << line.str() << '\n';

      csv << t << ',' << fmt(row.gamma_plus, "%.4f") << ',' << fmt(row.gamma_minus, "%.4f");
      for (int j = 0; j < n; ++j) csv << ',' << fmt(row.policy.K_plus[t][j], "%.4f");
      for (int j = 0; j < n; ++j) csv << ',' << fmt(row.policy.K_minus[t][j], "%.4f");
      csv << ',' << fmt(row.coeffs.a_plus[t], "%.4f") << ',' << fmt(row.coeffs.a_minus[t], "%.4f")
          << ',' << fmt(row.coeffs.b_plus[t], "%.4f") << ',' << fmt(row.coeffs.b_minus[t], "%.4f")
          << '\n';
    }
  }

  const std::string text_path = (dir / "report.txt").string();
  const std::string csv_path = (dir / "report.csv").string();
  {
    std::ofstream out(text_path);
    if (!out) throw ConfigError("cannot write '" + text_path + "'");
    out << text.str();
  }
  {
    std::ofstream out(csv_path);
    if (!out) throw ConfigError("cannot write '" + csv_path + "'");
    out << csv.str();
  }
  return {text_path, csv_path};
}

}  // namespace tcmv
