#include "ddsense/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace ddsense {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_double(const std::string& key, const std::string& value) {
  // accept simple fractions like 1/2 for the spin quantum number
  const size_t slash = value.find('/');
  try {
    if (slash != std::string::npos) {
      const double num = std::stod(trim(value.substr(0, slash)));
      const double den = std::stod(trim(value.substr(slash + 1)));
      return num / den;
    }
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (trim(value.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("invalid numeric value for key '" + key + "': " + value);
}

long parse_long(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  if (v != std::floor(v)) {
    throw ConfigError("key '" + key + "' requires an integer, got " + value);
  }
  return static_cast<long>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
  const std::string v = lower(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "' requires a boolean, got " + value);
}

}  // namespace

std::string protocol_name(Protocol p) { return p == Protocol::DC ? "dc" : "rf"; }
std::string model_name(Model m) { return m == Model::Secular ? "secular" : "full"; }

void apply_override(ExperimentConfig& config, const std::string& raw_key,
                    const std::string& raw_value) {
  const std::string key = lower(trim(raw_key));
  const std::string value = trim(raw_value);
  if (key.empty()) throw ConfigError("empty config key");
  if (value.empty()) throw ConfigError("empty value for key '" + key + "'");

  if (key == "s") {
    config.species.s = parse_double(key, value);
  } else if (key == "gamma") {
    config.species.gamma = parse_double(key, value);
  } else if (key == "m") {
    config.cluster_size = static_cast<int>(parse_long(key, value));
  } else if (key == "q") {
    config.n_clusters = parse_long(key, value);
  } else if (key == "protocol") {
    const std::string v = lower(value);
    if (v == "dc") config.protocol.protocol = Protocol::DC;
    else if (v == "rf") config.protocol.protocol = Protocol::RF;
    else throw ConfigError("key 'protocol' must be dc or rf, got " + value);
  } else if (key == "model") {
    const std::string v = lower(value);
    if (v == "secular") config.protocol.model = Model::Secular;
    else if (v == "full") config.protocol.model = Model::Full;
    else throw ConfigError("key 'model' must be secular or full, got " + value);
  } else if (key == "omega_ratio") {
    config.protocol.omega_ratio = parse_double(key, value);
  } else if (key == "b_rf") {
    config.protocol.rf_bias = parse_double(key, value);
  } else if (key == "rf_fd_step") {
    config.rf_fd_step = parse_double(key, value);
  } else if (key == "omega_fd_step") {
    config.omega_fd_rel_step = parse_double(key, value);
  } else if (key == "tau_min") {
    config.grid.tau_min = parse_double(key, value);
  } else if (key == "tau_max") {
    config.grid.tau_max = parse_double(key, value);
  } else if (key == "tau_points") {
    config.grid.points = static_cast<int>(parse_long(key, value));
  } else if (key == "tau_geometric") {
    config.grid.geometric = parse_bool(key, value);
  } else if (key == "seed") {
    config.seed = static_cast<uint64_t>(parse_long(key, value));
  } else if (key == "steps_per_period") {
    config.steps_per_period = static_cast<int>(parse_long(key, value));
  } else if (key == "rho") {
    config.rho = parse_double(key, value);
  } else if (key == "min_distance") {
    config.min_distance = parse_double(key, value);
  } else if (key == "covariance") {
    const std::string v = lower(value);
    if (v == "joint") config.quantum_only_covariance = false;
    else if (v == "quantum") config.quantum_only_covariance = true;
    else throw ConfigError("key 'covariance' must be joint or quantum, got " + value);
  } else if (key == "jackknife_blocks") {
    config.jackknife_blocks = static_cast<int>(parse_long(key, value));
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

ExperimentConfig parse_config_text(std::istream& in, const std::string& source_name) {
  ExperimentConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const size_t eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source_name + ":" + std::to_string(line_no) +
                        ": expected 'key = value', got '" + text + "'");
    }
    try {
      apply_override(config, text.substr(0, eq), text.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(source_name + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config_text(in, path);
}

namespace {

nlohmann::json config_to_json(const ExperimentConfig& c) {
  const UnitSystem units{c.rho, c.species};
  nlohmann::json j{
      {"s", c.species.s},
      {"gamma", c.species.gamma},
      {"M", c.cluster_size},
      {"Q", c.n_clusters},
      {"protocol", protocol_name(c.protocol.protocol)},
      {"model", model_name(c.protocol.model)},
      {"omega_ratio", c.protocol.omega_ratio},
      {"b_rf", c.protocol.rf_bias},
      {"rf_fd_step", c.rf_fd_step},
      {"omega_fd_step", c.omega_fd_rel_step},
      {"tau_min", c.grid.tau_min},
      {"tau_max", c.grid.tau_max},
      {"tau_points", c.grid.points},
      {"tau_geometric", c.grid.geometric},
      {"seed", c.seed},
      {"steps_per_period", c.steps_per_period},
      {"rho", c.rho},
      {"min_distance", c.min_distance},
      {"covariance", c.quantum_only_covariance ? "quantum" : "joint"},
      {"jackknife_blocks", c.jackknife_blocks},
      {"omega_dd", units.omega_dd()},
  };
  return j;
}

}  // namespace

nlohmann::json result_to_json(const ExperimentResult& r) {
  nlohmann::json j;
  j["config"] = config_to_json(r.config);
  j["curve"] = {
      {"tau", r.curve.tau},
      {"er_over_hbar", r.curve.er_over_hbar},
      {"stderr", r.curve.stderr_er},
      {"tau_opt", r.curve.tau_opt},
      {"er_min", r.curve.er_min},
      {"er_min_stderr", r.curve.er_min_stderr},
      {"boundary_minimum", r.curve.boundary_minimum},
  };
  auto components = [](const std::vector<Vec3>& v, int i) {
    std::vector<double> out(v.size());
    for (size_t k = 0; k < v.size(); ++k) out[k] = v[k](i);
    return out;
  };
  j["diagnostics"] = {
      {"mean_sx_per_spin", components(r.mean_per_spin, 0)},
      {"mean_sy_per_spin", components(r.mean_per_spin, 1)},
      {"mean_sz_per_spin", components(r.mean_per_spin, 2)},
      {"var_sx", components(r.var_per_spin, 0)},
      {"var_sy", components(r.var_per_spin, 1)},
      {"var_sz", components(r.var_per_spin, 2)},
  };
  j["provenance"] = {
      {"code_version", r.code_version},
      {"seed", r.config.seed},
      {"threads", r.threads_used},
      {"wall_seconds", r.wall_seconds},
  };
  if (r.config.protocol.protocol == Protocol::RF) {
    j["rf_gradient_check"] = {
        {"max_step_halving_mismatch", r.rf_fd_max_mismatch},
        {"converged", r.rf_fd_converged},
    };
  }
  return j;
}

void write_result_json(std::ostream& out, const ExperimentResult& result) {
  out << result_to_json(result).dump(2) << '\n';
}

void write_result_csv(std::ostream& out, const ExperimentResult& r) {
  out << kResultCsvHeader << '\n';
  out << std::setprecision(12);
  for (size_t t = 0; t < r.curve.tau.size(); ++t) {
    out << r.curve.tau[t] << ',' << r.curve.er_over_hbar[t] << ','
        << r.curve.stderr_er[t] << ',' << r.mean_per_spin[t].x() << ','
        << r.mean_per_spin[t].y() << ',' << r.mean_per_spin[t].z() << ','
        << r.var_per_spin[t].x() << ',' << r.var_per_spin[t].y() << ','
        << r.var_per_spin[t].z() << '\n';
  }
}

}  // namespace ddsense
