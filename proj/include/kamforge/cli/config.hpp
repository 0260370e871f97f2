#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kamforge/hamiltonian.hpp"
#include "kamforge/hypotheses.hpp"
#include "kamforge/kam.hpp"
#include "kamforge/modulus.hpp"
#include "kamforge/systems.hpp"

namespace kamforge::cli {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Typed readers; failures raise ConfigError naming the JSON path, e.g. "$.kam.grid: expected integer".
double read_number(const json& obj, const std::string& key, const std::string& path, std::optional<double> fallback = {});
long long read_integer(const json& obj, const std::string& key, const std::string& path,
                       std::optional<long long> fallback = {});
std::string read_string(const json& obj, const std::string& key, const std::string& path,
                        std::optional<std::string> fallback = {});

// {"family": "...", "alpha"|"lambda"|"rho"|"beta"|"table": ..., "delta": ...}
ModulusSpec modulus_from_json(const json& j, const std::string& path = "$");
json modulus_to_json(const ModulusSpec& spec);

struct SystemDescriptor {
  std::string which = "hh";  // "hh" or "hhh"
  double epsilon = 1e-4;
  double M = 10.0;
  std::string frequency = "golden2";
  std::vector<long double> omega;  // explicit frequency overrides the named one
  // hh
  double lambda = 2.0;
  // hhh
  double q = 0.3;
  double series_lambda = 1.5;
  int terms = 8;
  int truncation = 8;
  MatrixField matrix{};

  std::vector<long double> frequency_vector() const;
  HamiltonianModel build() const;
};

SystemDescriptor system_from_json(const json& j, const std::string& path = "$.system");
json system_to_json(const SystemDescriptor& s);

struct RunConfig {
  SystemDescriptor system;
  KamConfig kam;
  HypothesisOptions hypotheses;
};

RunConfig run_config_from_json(const json& j);
json run_config_to_json(const RunConfig& c);

json load_json_file(const std::string& path);

}  // namespace kamforge::cli
