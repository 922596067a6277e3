#include "tcmv/config_file.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace tcmv {

namespace {

std::string strip(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

bool numeric_line(const std::string& s) {
  const std::string t = strip(s);
  if (t.empty()) return false;
  return t.find_first_not_of("0123456789+-.eE \t,") == std::string::npos;
}

struct Entry {
  std::string value;                   // inline tokens after '='
  std::vector<std::string> block;      // continuation rows for matrices
  bool used = false;
};

using EntryMap = std::map<std::string, Entry>;

EntryMap tokenize_file(const std::string& text) {
  EntryMap entries;
  std::istringstream is(text);
  std::string line;
  std::string current_key;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (strip(line).empty()) continue;

    const bool continuation = std::isspace(static_cast<unsigned char>(line[0])) != 0;
    const auto eq = line.find('=');
    if (continuation && eq == std::string::npos) {
      if (current_key.empty() || !numeric_line(line))
        throw ConfigError("config line " + std::to_string(lineno) + ": unexpected continuation");
      entries[current_key].block.push_back(strip(line));
      continue;
    }
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = strip(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (entries.count(key))
      throw ConfigError("config: duplicate key '" + key + "'");
    entries[key].value = strip(line.substr(eq + 1));
    current_key = key;
  }
  return entries;
}

double to_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' has non-numeric value '" + s + "'");
  }
}

long to_long(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' has non-integer value '" + s + "'");
  }
}

class Reader {
 public:
  explicit Reader(EntryMap entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::string str(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("config: missing required key '" + key + "'");
    it->second.used = true;
    return it->second.value;
  }

  std::string str_or(const std::string& key, const std::string& fallback) {
    return has(key) ? str(key) : fallback;
  }

  double number(const std::string& key) { return to_double(str(key), key); }
  double number_or(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }
  long integer(const std::string& key) { return to_long(str(key), key); }
  long integer_or(const std::string& key, long fallback) {
    return has(key) ? integer(key) : fallback;
  }

  bool flag_or(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const std::string v = str(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: '" + key + "' must be true/false");
  }

  Eigen::VectorXd vector(const std::string& key) {
    const auto toks = tokens(str(key));
    if (toks.empty()) throw ConfigError("config: '" + key + "' has no values");
    Eigen::VectorXd v(toks.size());
    for (std::size_t i = 0; i < toks.size(); ++i) v[i] = to_double(toks[i], key);
    return v;
  }

  // Scalar broadcast or exactly `size` entries.
  Eigen::VectorXd vector_broadcast(const std::string& key, int size) {
    Eigen::VectorXd v = vector(key);
    if (v.size() == 1) return Eigen::VectorXd::Constant(size, v[0]);
    if (v.size() != size)
      throw ConfigError("config: '" + key + "' needs 1 or " + std::to_string(size) + " values");
    return v;
  }

  Eigen::MatrixXd matrix(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("config: missing required key '" + key + "'");
    it->second.used = true;
    std::vector<std::vector<double>> rows;
    if (!it->second.value.empty()) {
      // Inline form with ';' row separators.
      std::string row;
      std::istringstream is(it->second.value);
      while (std::getline(is, row, ';')) {
        std::vector<double> r;
        for (const auto& tok : tokens(row)) r.push_back(to_double(tok, key));
        if (!r.empty()) rows.push_back(std::move(r));
      }
    }
    for (const auto& line : it->second.block) {
      std::vector<double> r;
      for (const auto& tok : tokens(line)) r.push_back(to_double(tok, key));
      if (!r.empty()) rows.push_back(std::move(r));
    }
    if (rows.empty()) throw ConfigError("config: '" + key + "' has no rows");
    Eigen::MatrixXd m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.front().size())
        throw ConfigError("config: '" + key + "' rows have uneven length");
      for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::vector<std::string> names(const std::string& key) { return tokens(str(key)); }

  void fail_on_unknown() const {
    for (const auto& [key, entry] : entries_) {
      if (!entry.used) throw ConfigError("config: unknown key '" + key + "'");
    }
  }

 private:
  EntryMap entries_;
};

}  // namespace

std::vector<RowMatrixXd> load_scenario_csv(const std::string& path, int horizon, int assets) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::vector<std::vector<std::vector<double>>> rows(horizon);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string cleaned = line;
    for (auto& c : cleaned)
      if (c == ',') c = ' ';
    const auto toks = tokens(cleaned);
    if (toks.empty()) continue;
    if (lineno == 1 && !numeric_line(cleaned)) continue;  // header
    if (static_cast<int>(toks.size()) != assets + 1)
      throw ConfigError("scenario file '" + path + "' line " + std::to_string(lineno) +
                        ": expected period plus " + std::to_string(assets) + " returns");
    const long t = to_long(toks[0], "period");
    if (t < 0 || t >= horizon)
      throw ConfigError("scenario file '" + path + "' line " + std::to_string(lineno) +
                        ": period out of range");
    std::vector<double> r(assets);
    for (int j = 0; j < assets; ++j) r[j] = to_double(toks[j + 1], "scenario");
    rows[t].push_back(std::move(r));
  }
  std::vector<RowMatrixXd> periods(horizon);
  for (int t = 0; t < horizon; ++t) {
    if (rows[t].size() < 2)
      throw ConfigError("scenario file '" + path + "': period " + std::to_string(t) +
                        " has fewer than 2 samples");
    periods[t].resize(rows[t].size(), assets);
    for (std::size_t i = 0; i < rows[t].size(); ++i)
      for (int j = 0; j < assets; ++j) periods[t](i, j) = rows[t][i][j];
  }
  return periods;
}

ConeConstraint load_cone_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open cone file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string cleaned = line;
    for (auto& c : cleaned)
      if (c == ',') c = ' ';
    const auto toks = tokens(cleaned);
    if (toks.empty()) continue;
    std::vector<double> r;
    for (const auto& tok : toks) r.push_back(to_double(tok, "cone"));
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ConfigError("cone file '" + path + "' has no rows");
  Eigen::MatrixXd A(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size())
      throw ConfigError("cone file '" + path + "' rows have uneven length");
    for (std::size_t j = 0; j < rows[i].size(); ++j) A(i, j) = rows[i][j];
  }
  return ConeConstraint::from_rows(std::move(A), std::filesystem::path(path).stem().string());
}

void RunConfig::validate() const {
  market.validate();
  risk.validate(market.horizon);
  search.validate();
  if (scenarios < 2) throw ConfigError("config: scenarios must be >= 2");
  if (sim_paths < 1) throw ConfigError("config: sim_paths must be >= 1");
  if (cone && !cone->unconstrained() && cone->A.cols() != market.assets)
    throw ConfigError("config: cone columns do not match asset count");
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  Reader r(tokenize_file(text));
  RunConfig cfg;

  cfg.market.horizon = static_cast<int>(r.integer("horizon"));
  if (cfg.market.horizon < 1) throw ConfigError("config: horizon must be >= 1");
  cfg.market.riskfree = r.vector_broadcast("riskfree", cfg.market.horizon);

  if (r.has("assets")) cfg.market.asset_names = r.names("assets");

  if (r.has("scenario_file")) {
    const std::string rel = r.str("scenario_file");
    const std::string path =
        (std::filesystem::path(rel).is_absolute() ? rel
                                                  : (std::filesystem::path(base_dir) / rel).string());
    const int assets = static_cast<int>(r.integer_or(
        "n_assets", static_cast<long>(cfg.market.asset_names.size())));
    if (assets < 1)
      throw ConfigError("config: raw scenarios need 'assets' names or an 'n_assets' count");
    cfg.market.assets = assets;
    RawScenarios raw;
    raw.periods = load_scenario_csv(path, cfg.market.horizon, assets);
    cfg.market.returns = std::move(raw);
  } else {
    MomentSpec spec;
    spec.mean = r.vector("mean");
    spec.stddev = r.vector("stddev");
    spec.corr = r.matrix("corr");
    const std::string convention = r.str_or("moment_convention", "arithmetic");
    if (convention == "log")
      spec.log_moments = true;
    else if (convention != "arithmetic")
      throw ConfigError("config: moment_convention must be arithmetic or log");
    cfg.market.assets = static_cast<int>(spec.mean.size());
    cfg.market.returns = std::move(spec);
  }
  if (!cfg.market.asset_names.empty() &&
      static_cast<int>(cfg.market.asset_names.size()) != cfg.market.assets)
    throw ConfigError("config: asset name count does not match asset count");

  cfg.risk.gamma_plus = r.vector_broadcast("gamma_plus", cfg.market.horizon);
  cfg.risk.gamma_minus = r.vector_broadcast("gamma_minus", cfg.market.horizon);
  cfg.risk.target = r.number("target");
  cfg.x0 = r.number_or("x0", 1.0);

  if (r.has("cone")) {
    const std::string cone_name = r.str("cone");
    if (cone_name == "no_shorting") {
      cfg.cone = ConeConstraint::no_shorting(cfg.market.assets);
    } else if (cone_name == "none") {
      cfg.cone.reset();
    } else {
      throw ConfigError("config: unknown cone preset '" + cone_name + "'");
    }
  }
  if (r.has("cone_file")) {
    const std::string rel = r.str("cone_file");
    const std::string path =
        (std::filesystem::path(rel).is_absolute() ? rel
                                                  : (std::filesystem::path(base_dir) / rel).string());
    cfg.cone = load_cone_file(path);
  }

  cfg.scenarios = r.integer_or("scenarios", 20000);
  cfg.seed = static_cast<std::uint64_t>(r.integer_or("seed", static_cast<long>(kDefaultSeed)));
  if (r.has("sim_seed")) cfg.sim_seed = static_cast<std::uint64_t>(r.integer("sim_seed"));
  cfg.sim_paths = r.integer_or("sim_paths", 100000);
  cfg.in_sample = r.flag_or("in_sample", false);

  cfg.search.lattice_per_axis = static_cast<int>(r.integer_or("lattice_per_axis", 3));
  cfg.search.step_init = r.number_or("step_init", 0.25);
  cfg.search.step_shrink = r.number_or("step_shrink", 0.5);
  cfg.search.step_tol = r.number_or("step_tol", 1e-6);
  cfg.search.max_evals = r.integer_or("max_evals", 200000);
  cfg.search.polish_rounds = static_cast<int>(r.integer_or("polish_rounds", 6));

  r.fail_on_unknown();
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace tcmv
