#include "qomsim/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qomsim/csv.hpp"

namespace qomsim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && end != s.c_str() && errno == 0;
}

bool parse_int(const std::string& s, int& out) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  out = static_cast<int>(v);
  return end == s.c_str() + s.size() && end != s.c_str() && errno == 0 && v == out;
}

}  // namespace

FileConfig parse_config_text(const std::string& text) {
  FileConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << "config line " << lineno << ": expected 'key = value', got '" << line << "'";
      throw std::invalid_argument(os.str());
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      std::ostringstream os;
      os << "config line " << lineno << ": empty key";
      throw std::invalid_argument(os.str());
    }
    cfg[key] = value;
  }
  return cfg;
}

FileConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return parse_config_text(os.str());
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "delta_c", "omega_m", "g_opt",   "rabi",     "gamma_a",     "gamma_b",
      "nbar_a",  "nbar_b",  "t_end",   "n_samples", "rel_tol",    "abs_tol",
      "rhs_variant", "initial_state"};
  return keys;
}

std::vector<std::string> apply_config(const FileConfig& cfg, SystemParams& params,
                                      SimConfig& sim) {
  std::vector<std::string> errors;
  const auto bad_value = [&errors](const std::string& key, const std::string& value) {
    errors.push_back("config key '" + key + "': cannot parse value '" + value + "'");
  };

  for (const auto& [key, value] : cfg) {
    double d = 0.0;
    int i = 0;
    if (key == "delta_c") { if (parse_double(value, d)) params.delta_c = d; else bad_value(key, value); }
    else if (key == "omega_m") { if (parse_double(value, d)) params.omega_m = d; else bad_value(key, value); }
    else if (key == "g_opt") { if (parse_double(value, d)) params.g_opt = d; else bad_value(key, value); }
    else if (key == "rabi") { if (parse_double(value, d)) params.rabi = d; else bad_value(key, value); }
    else if (key == "gamma_a") { if (parse_double(value, d)) params.gamma_a = d; else bad_value(key, value); }
    else if (key == "gamma_b") { if (parse_double(value, d)) params.gamma_b = d; else bad_value(key, value); }
    else if (key == "nbar_a") { if (parse_double(value, d)) params.nbar_a = d; else bad_value(key, value); }
    else if (key == "nbar_b") { if (parse_double(value, d)) params.nbar_b = d; else bad_value(key, value); }
    else if (key == "t_end") { if (parse_double(value, d)) sim.t_end = d; else bad_value(key, value); }
    else if (key == "n_samples") { if (parse_int(value, i)) sim.n_samples = i; else bad_value(key, value); }
    else if (key == "rel_tol") { if (parse_double(value, d)) sim.rel_tol = d; else bad_value(key, value); }
    else if (key == "abs_tol") { if (parse_double(value, d)) sim.abs_tol = d; else bad_value(key, value); }
    else if (key == "rhs_variant") {
      if (const auto v = rhs_variant_from_string(value)) sim.rhs_variant = *v;
      else errors.push_back("config key 'rhs_variant': expected closed|composed, got '" + value + "'");
    }
    else if (key == "initial_state") {
      if (value == "vacuum") {
        sim.initial_state.reset();
      } else {
        try {
          sim.initial_state = load_flat_state_json(value);
        } catch (const std::exception& e) {
          errors.push_back(std::string("config key 'initial_state': ") + e.what());
        }
      }
    }
    else {
      std::string msg = "unknown config key '" + key + "'; valid keys:";
      for (const auto& k : config_keys()) msg += " " + k;
      errors.push_back(msg);
    }
  }
  return errors;
}

std::string to_config_text(const SystemParams& params, const SimConfig& sim) {
  std::ostringstream os;
  os << "delta_c = " << format_g17(params.delta_c) << "\n";
  os << "omega_m = " << format_g17(params.omega_m) << "\n";
  os << "g_opt = " << format_g17(params.g_opt) << "\n";
  os << "rabi = " << format_g17(params.rabi) << "\n";
  os << "gamma_a = " << format_g17(params.gamma_a) << "\n";
  os << "gamma_b = " << format_g17(params.gamma_b) << "\n";
  os << "nbar_a = " << format_g17(params.nbar_a) << "\n";
  os << "nbar_b = " << format_g17(params.nbar_b) << "\n";
  os << "t_end = " << format_g17(sim.t_end) << "\n";
  os << "n_samples = " << sim.n_samples << "\n";
  os << "rel_tol = " << format_g17(sim.rel_tol) << "\n";
  os << "abs_tol = " << format_g17(sim.abs_tol) << "\n";
  os << "rhs_variant = " << to_string(sim.rhs_variant) << "\n";
  if (!sim.initial_state) os << "initial_state = vacuum\n";
  return os.str();
}

}  // namespace qomsim
