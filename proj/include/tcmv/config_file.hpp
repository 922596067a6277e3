#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "tcmv/coefficients.hpp"
#include "tcmv/cone.hpp"
#include "tcmv/market.hpp"
#include "tcmv/optimizer.hpp"

namespace tcmv {

// Default scenario seed for freshly written configs and CLI runs without an
// explicit --seed.
inline constexpr std::uint64_t kDefaultSeed = 17;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Everything one run needs, assembled from a key/value + matrix-block text
// file (see README for the format).
struct RunConfig {
  MarketSpec market;
  RiskAversionSpec risk;
  double x0 = 1.0;
  std::optional<ConeConstraint> cone;
  long scenarios = 20000;
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::uint64_t> sim_seed;  // default: seed + 1 (out-of-sample)
  long sim_paths = 100000;
  bool in_sample = false;
  SearchConfig search;

  std::uint64_t simulation_seed() const { return sim_seed.value_or(seed + 1); }
  void validate() const;
};

RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

// Raw excess-return scenarios: CSV rows "period,p_1,...,p_n" (header optional).
std::vector<RowMatrixXd> load_scenario_csv(const std::string& path, int horizon, int assets);

// Cone rows from a whitespace/comma separated text file, one row per line.
ConeConstraint load_cone_file(const std::string& path);

}  // namespace tcmv
