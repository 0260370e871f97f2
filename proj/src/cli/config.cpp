#include "kamforge/cli/config.hpp"

#include <cmath>
#include <fstream>

#include "kamforge/diophantine.hpp"
#include "kamforge/errors.hpp"

namespace kamforge::cli {
namespace {

std::string child(const std::string& path, const std::string& key) { return path + "." + key; }

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected object");
}

}  // namespace

double read_number(const json& obj, const std::string& key, const std::string& path, std::optional<double> fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) {
    if (fallback) return *fallback;
    throw ConfigError(child(path, key) + ": missing required number");
  }
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(child(path, key) + ": expected number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(child(path, key) + ": expected finite number");
  return d;
}

long long read_integer(const json& obj, const std::string& key, const std::string& path,
                       std::optional<long long> fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) {
    if (fallback) return *fallback;
    throw ConfigError(child(path, key) + ": missing required integer");
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(child(path, key) + ": expected integer");
  return v.get<long long>();
}

std::string read_string(const json& obj, const std::string& key, const std::string& path,
                        std::optional<std::string> fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) {
    if (fallback) return *fallback;
    throw ConfigError(child(path, key) + ": missing required string");
  }
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(child(path, key) + ": expected string");
  return v.get<std::string>();
}

ModulusSpec modulus_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  const std::string name = read_string(j, "family", path);
  ModulusFamily family;
  try {
    family = parse_family(name);
  } catch (const Error& e) {
    throw ConfigError(child(path, "family") + ": " + e.what());
  }
  const double delta = read_number(j, "delta", path, 0.0);
  ModulusSpec s;
  switch (family) {
    case ModulusFamily::holder:
      s = ModulusSpec::holder(read_number(j, "alpha", path), delta > 0 ? delta : 1.0);
      break;
    case ModulusFamily::log_holder:
      s = ModulusSpec::log_holder(read_number(j, "lambda", path), delta > 0 ? delta : 0.5);
      break;
    case ModulusFamily::gen_log_holder:
      s = ModulusSpec::gen_log_holder(static_cast<int>(read_integer(j, "rho", path)), read_number(j, "lambda", path),
                                      delta);
      break;
    case ModulusFamily::lipschitz:
      s = ModulusSpec::lipschitz(delta > 0 ? delta : 1.0);
      break;
    case ModulusFamily::power_log:
      s = ModulusSpec::power_log(read_number(j, "beta", path), read_number(j, "lambda", path),
                                 delta > 0 ? delta : 0.5);
      break;
    case ModulusFamily::tabulated: {
      if (!j.contains("table") || !j.at("table").is_array()) throw ConfigError(child(path, "table") + ": expected array");
      std::vector<std::pair<double, double>> table;
      const json& t = j.at("table");
      for (std::size_t i = 0; i < t.size(); ++i) {
        const std::string p = child(path, "table") + "[" + std::to_string(i) + "]";
        if (!t[i].is_array() || t[i].size() != 2 || !t[i][0].is_number() || !t[i][1].is_number()) {
          throw ConfigError(p + ": expected [x, value]");
        }
        table.emplace_back(t[i][0].get<double>(), t[i][1].get<double>());
      }
      s = ModulusSpec::tabulated(std::move(table), delta);
      break;
    }
  }
  try {
    s.validate();
  } catch (const Error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return s;
}

json modulus_to_json(const ModulusSpec& s) {
  json j;
  j["family"] = family_name(s.family);
  j["delta"] = s.delta;
  switch (s.family) {
    case ModulusFamily::holder:
      j["alpha"] = s.alpha;
      break;
    case ModulusFamily::log_holder:
      j["lambda"] = s.lambda;
      break;
    case ModulusFamily::gen_log_holder:
      j["rho"] = s.rho;
      j["lambda"] = s.lambda;
      break;
    case ModulusFamily::lipschitz:
      break;
    case ModulusFamily::power_log:
      j["beta"] = s.beta;
      j["lambda"] = s.lambda;
      break;
    case ModulusFamily::tabulated:
      j["table"] = json::array();
      for (const auto& [x, v] : s.table) j["table"].push_back({x, v});
      break;
  }
  return j;
}

std::vector<long double> SystemDescriptor::frequency_vector() const {
  if (!omega.empty()) return omega;
  try {
    return standard_frequency(frequency).omega;
  } catch (const Error& e) {
    throw ConfigError("$.system.frequency: " + std::string(e.what()));
  }
}

HamiltonianModel SystemDescriptor::build() const {
  const auto om = frequency_vector();
  const std::vector<double> w(om.begin(), om.end());
  if (which == "hh") return hamiltonian_hh(epsilon, M, w, lambda);
  if (which == "hhh") return hamiltonian_hhh(epsilon, qn_sequence(q, series_lambda, terms), matrix, w, M, truncation);
  throw ConfigError("$.system.which: expected \"hh\" or \"hhh\"");
}

SystemDescriptor system_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  SystemDescriptor s;
  s.which = read_string(j, "which", path, s.which);
  if (s.which != "hh" && s.which != "hhh") throw ConfigError(child(path, "which") + ": expected \"hh\" or \"hhh\"");
  s.epsilon = read_number(j, "epsilon", path, s.epsilon);
  s.M = read_number(j, "M", path, s.M);
  if (!(s.M > 0)) throw ConfigError(child(path, "M") + ": must be positive");
  s.frequency = read_string(j, "frequency", path, s.frequency);
  if (j.contains("omega") && !j.at("omega").is_null()) {
    const json& o = j.at("omega");
    if (!o.is_array() || o.size() != 2) throw ConfigError(child(path, "omega") + ": expected array of 2 numbers");
    for (std::size_t i = 0; i < o.size(); ++i) {
      if (!o[i].is_number()) throw ConfigError(child(path, "omega") + "[" + std::to_string(i) + "]: expected number");
      s.omega.push_back(o[i].get<double>());
    }
  }
  s.lambda = read_number(j, "lambda", path, s.lambda);
  s.q = read_number(j, "q", path, s.q);
  s.series_lambda = read_number(j, "series_lambda", path, s.series_lambda);
  s.terms = static_cast<int>(read_integer(j, "terms", path, s.terms));
  s.truncation = static_cast<int>(read_integer(j, "truncation", path, s.truncation));
  if (j.contains("matrix")) {
    const json& m = j.at("matrix");
    const std::string mp = child(path, "matrix");
    require_object(m, mp);
    if (m.contains("constant")) {
      const json& c = m.at("constant");
      if (!c.is_array() || c.size() != 2 || !c[0].is_array() || !c[1].is_array() || c[0].size() != 2 ||
          c[1].size() != 2) {
        throw ConfigError(child(mp, "constant") + ": expected 2x2 array");
      }
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          if (!c[a][b].is_number()) throw ConfigError(child(mp, "constant") + ": expected numbers");
          s.matrix.constant(a, b) = c[a][b].get<double>();
        }
      }
    }
    s.matrix.cos_amplitude = read_number(m, "cos_amplitude", mp, s.matrix.cos_amplitude);
    s.matrix.cos_axis = static_cast<int>(read_integer(m, "cos_axis", mp, s.matrix.cos_axis));
    s.matrix.cos_wavenumber = static_cast<int>(read_integer(m, "cos_wavenumber", mp, s.matrix.cos_wavenumber));
  }
  return s;
}

json system_to_json(const SystemDescriptor& s) {
  json j;
  j["which"] = s.which;
  j["epsilon"] = s.epsilon;
  j["M"] = s.M;
  j["frequency"] = s.frequency;
  if (!s.omega.empty()) {
    j["omega"] = json::array();
    for (auto w : s.omega) j["omega"].push_back(static_cast<double>(w));
  }
  if (s.which == "hh") {
    j["lambda"] = s.lambda;
  } else {
    j["q"] = s.q;
    j["series_lambda"] = s.series_lambda;
    j["terms"] = s.terms;
    j["truncation"] = s.truncation;
    j["matrix"] = {{"constant", {{s.matrix.constant(0, 0), s.matrix.constant(0, 1)},
                                 {s.matrix.constant(1, 0), s.matrix.constant(1, 1)}}},
                   {"cos_amplitude", s.matrix.cos_amplitude},
                   {"cos_axis", s.matrix.cos_axis},
                   {"cos_wavenumber", s.matrix.cos_wavenumber}};
  }
  return j;
}

RunConfig run_config_from_json(const json& j) {
  require_object(j, "$");
  if (j.contains("schema_version") && read_integer(j, "schema_version", "$") != kSchemaVersion) {
    throw ConfigError("$.schema_version: unsupported version");
  }
  RunConfig c;
  if (!j.contains("system")) throw ConfigError("$.system: missing required object");
  c.system = system_from_json(j.at("system"));
  if (j.contains("kam")) {
    const json& k = j.at("kam");
    const std::string p = "$.kam";
    require_object(k, p);
    c.kam.epsilon = read_number(k, "epsilon", p, c.kam.epsilon);
    c.kam.theta = read_number(k, "theta", p, c.kam.theta);
    c.kam.nu_max = static_cast<int>(read_integer(k, "nu_max", p, c.kam.nu_max));
    c.kam.N = static_cast<int>(read_integer(k, "grid", p, c.kam.N));
    c.kam.tau = read_number(k, "tau", p, c.kam.tau);
    c.kam.increment_tol = read_number(k, "increment_tol", p, c.kam.increment_tol);
    if (k.contains("delta_star_cap") && !k.at("delta_star_cap").is_null()) {
      c.kam.delta_star_cap = read_number(k, "delta_star_cap", p);
    }
    c.kam.seed = static_cast<unsigned long long>(read_integer(k, "seed", p, static_cast<long long>(c.kam.seed)));
    c.kam.symplectic_samples = static_cast<int>(read_integer(k, "symplectic_samples", p, c.kam.symplectic_samples));
  }
  c.hypotheses.tau = c.kam.tau;
  if (j.contains("hypotheses")) {
    const json& h = j.at("hypotheses");
    const std::string p = "$.hypotheses";
    require_object(h, p);
    c.hypotheses.lattice_cutoff = static_cast<long>(read_integer(h, "lattice_cutoff", p, c.hypotheses.lattice_cutoff));
    c.hypotheses.grid = static_cast<int>(read_integer(h, "grid", p, c.hypotheses.grid));
    c.hypotheses.bound_grid = static_cast<int>(read_integer(h, "bound_grid", p, c.hypotheses.bound_grid));
    c.hypotheses.action_samples = static_cast<int>(read_integer(h, "action_samples", p, c.hypotheses.action_samples));
  }
  try {
    c.kam.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("$.") + e.what());
  }
  return c;
}

json run_config_to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["system"] = system_to_json(c.system);
  j["kam"] = {{"epsilon", c.kam.epsilon},
              {"theta", c.kam.theta},
              {"nu_max", c.kam.nu_max},
              {"grid", c.kam.N},
              {"tau", c.kam.tau},
              {"increment_tol", c.kam.increment_tol},
              {"delta_star_cap", c.kam.delta_star_cap ? json(*c.kam.delta_star_cap) : json(nullptr)},
              {"seed", c.kam.seed},
              {"symplectic_samples", c.kam.symplectic_samples}};
  j["hypotheses"] = {{"lattice_cutoff", c.hypotheses.lattice_cutoff},
                     {"grid", c.hypotheses.grid},
                     {"bound_grid", c.hypotheses.bound_grid},
                     {"action_samples", c.hypotheses.action_samples}};
  return j;
}

json load_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path + ": cannot open");
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace kamforge::cli
