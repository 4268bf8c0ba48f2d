#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qomsim/params.hpp"

namespace qomsim {

/// Process exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitNumericalFailure = 2;
inline constexpr int kExitComparisonFailure = 3;

/// Values the user explicitly supplied on the command line. Precedence is
/// built-in default < preset < config file < flag.
struct Overrides {
  std::optional<double> delta_c, omega_m, g_opt, rabi;
  std::optional<double> gamma_a, gamma_b, nbar_a, nbar_b;
  std::optional<double> t_end, rel_tol, abs_tol;
  std::optional<int> n_samples;
  std::optional<std::string> rhs_variant;
  std::optional<std::string> initial_state;  ///< "vacuum" or JSON path
  std::optional<std::string> config_path;
  std::optional<std::string> preset_name;
};

struct StepperOverrides {
  std::optional<std::string> mode;  ///< "adaptive" or "fixed"
  std::optional<double> h_init, h_min, h_max;
  std::optional<long> max_steps;
};

struct SimulateOptions {
  Overrides o;
  StepperOverrides stepper;
  std::string out = "run.csv";
  std::optional<std::string> from_sidecar;  ///< reproduce a run from its JSON sidecar
};

struct OracleOptions {
  Overrides o;
  StepperOverrides stepper;
  std::string out = "oracle.csv";
  int n_cut_a = 10;
  int n_cut_b = 14;
  double eps = 1e-9;
  bool convergence_check = true;
};

struct CompareOptions {
  std::string file_a, file_b;
  double abs_tol = 1e-9;
  double rel_tol = 1e-6;
};

struct SweepOptions {
  SimulateOptions base;
  std::string param;                ///< a SystemParams field name
  std::vector<std::string> values;  ///< kept verbatim for file naming
  std::string out_dir = "sweep";
  int jobs = 1;
};

/// Runs the moment-closure simulation and writes <out> plus a JSON sidecar
/// (same stem, .json) with params, config, stepper, stats, invariants, the
/// code version and claim results when a preset carries claims.
int cmd_simulate(const SimulateOptions& opt, std::ostream& msg, std::ostream& err);

/// Runs the truncated master-equation oracle on the same schema; the sidecar
/// carries the cutoff-convergence report.
int cmd_oracle(const OracleOptions& opt, std::ostream& msg, std::ostream& err);

/// Per-column max absolute/relative deviation between two observables CSVs;
/// exit 0 iff every column is within abs_tol + rel_tol * scale.
int cmd_compare(const CompareOptions& opt, std::ostream& msg, std::ostream& err);

/// One simulate run per value of the swept parameter, each writing its own
/// file; index.json (value -> file) is written last. Points may run on
/// several worker threads; output is independent of the worker count.
int cmd_sweep(const SweepOptions& opt, std::ostream& msg, std::ostream& err);

/// Prints a preset in config-file format (pipe to a file and reuse with
/// --config).
int cmd_preset(const std::string& name, std::ostream& msg, std::ostream& err);

/// One line per preset with its caption parameters.
int cmd_list_presets(std::ostream& msg);

}  // namespace qomsim
