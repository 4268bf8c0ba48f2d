// Command-line front end: simulate | oracle | compare | sweep | preset |
// list-presets. Exit codes: 0 ok, 1 config error, 2 numerical failure,
// 3 comparison failure.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qomsim/runner.hpp"
#include "qomsim/version.hpp"

namespace {

struct FlagBindings {
  double delta_c = 0, omega_m = 0, g_opt = 0, rabi = 0;
  double gamma_a = 0, gamma_b = 0, nbar_a = 0, nbar_b = 0;
  double t_end = 0, rel_tol = 0, abs_tol = 0;
  int n_samples = 0;
  std::string rhs_variant, initial_state, config_path, preset_name;
};

struct StepperFlagBindings {
  std::string mode;
  double h_init = 0, h_min = 0, h_max = 0;
  long max_steps = 0;
};

void add_common_flags(CLI::App* cmd, FlagBindings& f) {
  cmd->add_option("--delta-c", f.delta_c, "cavity detuning (units of omega_m)");
  cmd->add_option("--omega-m", f.omega_m, "mechanical frequency (normalization unit)");
  cmd->add_option("--g-opt", f.g_opt, "quadratic coupling strength");
  cmd->add_option("--rabi", f.rabi, "drive Rabi frequency");
  cmd->add_option("--gamma-a", f.gamma_a, "cavity damping rate");
  cmd->add_option("--gamma-b", f.gamma_b, "mechanical damping rate");
  cmd->add_option("--nbar-a", f.nbar_a, "thermal photon number");
  cmd->add_option("--nbar-b", f.nbar_b, "thermal phonon number");
  cmd->add_option("--t-end", f.t_end, "simulated time span");
  cmd->add_option("--n-samples", f.n_samples, "number of output samples");
  cmd->add_option("--rel-tol", f.rel_tol, "integrator relative tolerance");
  cmd->add_option("--abs-tol", f.abs_tol, "integrator absolute tolerance");
  cmd->add_option("--rhs-variant", f.rhs_variant, "closed|composed");
  cmd->add_option("--initial-state", f.initial_state,
                  "'vacuum' or path to a JSON array of 28 reals");
  cmd->add_option("--config", f.config_path, "key = value config file");
  cmd->add_option("--preset", f.preset_name, "named scenario preset");
}

void add_stepper_flags(CLI::App* cmd, StepperFlagBindings& f) {
  cmd->add_option("--mode", f.mode, "stepper mode: adaptive|fixed");
  cmd->add_option("--h-init", f.h_init, "initial (or fixed) step size");
  cmd->add_option("--h-min", f.h_min, "minimum step size");
  cmd->add_option("--h-max", f.h_max, "maximum step size");
  cmd->add_option("--max-steps", f.max_steps, "step budget");
}

template <typename T>
std::optional<T> picked(const CLI::App* cmd, const std::string& flag, const T& value) {
  if (cmd->count(flag) > 0) return value;
  return std::nullopt;
}

qomsim::Overrides collect_overrides(const CLI::App* cmd, const FlagBindings& f) {
  qomsim::Overrides o;
  o.delta_c = picked(cmd, "--delta-c", f.delta_c);
  o.omega_m = picked(cmd, "--omega-m", f.omega_m);
  o.g_opt = picked(cmd, "--g-opt", f.g_opt);
  o.rabi = picked(cmd, "--rabi", f.rabi);
  o.gamma_a = picked(cmd, "--gamma-a", f.gamma_a);
  o.gamma_b = picked(cmd, "--gamma-b", f.gamma_b);
  o.nbar_a = picked(cmd, "--nbar-a", f.nbar_a);
  o.nbar_b = picked(cmd, "--nbar-b", f.nbar_b);
  o.t_end = picked(cmd, "--t-end", f.t_end);
  o.n_samples = picked(cmd, "--n-samples", f.n_samples);
  o.rel_tol = picked(cmd, "--rel-tol", f.rel_tol);
  o.abs_tol = picked(cmd, "--abs-tol", f.abs_tol);
  o.rhs_variant = picked(cmd, "--rhs-variant", f.rhs_variant);
  o.initial_state = picked(cmd, "--initial-state", f.initial_state);
  o.config_path = picked(cmd, "--config", f.config_path);
  o.preset_name = picked(cmd, "--preset", f.preset_name);
  return o;
}

qomsim::StepperOverrides collect_stepper(const CLI::App* cmd,
                                         const StepperFlagBindings& f) {
  qomsim::StepperOverrides s;
  s.mode = picked(cmd, "--mode", f.mode);
  s.h_init = picked(cmd, "--h-init", f.h_init);
  s.h_min = picked(cmd, "--h-min", f.h_min);
  s.h_max = picked(cmd, "--h-max", f.h_max);
  s.max_steps = picked(cmd, "--max-steps", f.max_steps);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadratically coupled optomechanical cavity simulator"};
  app.set_version_flag("--version", qomsim::kVersion);
  app.require_subcommand(1);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "moment-closure transient run");
  FlagBindings sim_flags;
  StepperFlagBindings sim_stepper;
  std::string sim_out = "run.csv";
  std::string from_sidecar;
  add_common_flags(sim_cmd, sim_flags);
  add_stepper_flags(sim_cmd, sim_stepper);
  sim_cmd->add_option("--out", sim_out, "output CSV path (sidecar: same stem, .json)");
  sim_cmd->add_option("--from-sidecar", from_sidecar,
                      "reproduce a run from its JSON sidecar");

  // oracle
  auto* ora_cmd = app.add_subcommand("oracle", "truncated master-equation reference run");
  FlagBindings ora_flags;
  StepperFlagBindings ora_stepper;
  std::string ora_out = "oracle.csv";
  int n_cut_a = 10, n_cut_b = 14;
  double ora_eps = 1e-9;
  bool no_convergence = false;
  add_common_flags(ora_cmd, ora_flags);
  add_stepper_flags(ora_cmd, ora_stepper);
  ora_cmd->add_option("--out", ora_out, "output CSV path");
  ora_cmd->add_option("--n-cut-a", n_cut_a, "photon Fock cutoff (levels per mode)");
  ora_cmd->add_option("--n-cut-b", n_cut_b, "phonon Fock cutoff (levels per mode)");
  ora_cmd->add_option("--eps", ora_eps, "population guard for the correlations");
  ora_cmd->add_flag("--no-convergence-check", no_convergence,
                    "skip the +4 cutoff convergence run");

  // compare
  auto* cmp_cmd = app.add_subcommand("compare", "diff two observables CSV files");
  qomsim::CompareOptions cmp;
  cmp_cmd->add_option("file_a", cmp.file_a, "first CSV")->required();
  cmp_cmd->add_option("file_b", cmp.file_b, "second CSV")->required();
  cmp_cmd->add_option("--abs-tol", cmp.abs_tol, "absolute tolerance");
  cmp_cmd->add_option("--rel-tol", cmp.rel_tol, "relative tolerance");

  // sweep
  auto* swp_cmd = app.add_subcommand("sweep", "run one simulate per parameter value");
  FlagBindings swp_flags;
  StepperFlagBindings swp_stepper;
  qomsim::SweepOptions swp;
  add_common_flags(swp_cmd, swp_flags);
  add_stepper_flags(swp_cmd, swp_stepper);
  swp_cmd->add_option("--param", swp.param, "swept SystemParams field")->required();
  swp_cmd->add_option("--values", swp.values, "comma-separated values")
      ->required()
      ->delimiter(',');
  swp_cmd->add_option("--out-dir", swp.out_dir, "output directory");
  swp_cmd->add_option("--jobs", swp.jobs, "worker threads");

  // preset / list-presets
  auto* pre_cmd = app.add_subcommand("preset", "print a preset as a config file");
  std::string preset_name;
  pre_cmd->add_option("name", preset_name, "preset name")->required();
  auto* lst_cmd = app.add_subcommand("list-presets", "list scenario presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? qomsim::kExitOk : qomsim::kExitConfigError;
  }

  if (sim_cmd->parsed()) {
    qomsim::SimulateOptions opt;
    opt.o = collect_overrides(sim_cmd, sim_flags);
    opt.stepper = collect_stepper(sim_cmd, sim_stepper);
    opt.out = sim_out;
    if (sim_cmd->count("--from-sidecar") > 0) opt.from_sidecar = from_sidecar;
    return qomsim::cmd_simulate(opt, std::cout, std::cerr);
  }
  if (ora_cmd->parsed()) {
    qomsim::OracleOptions opt;
    opt.o = collect_overrides(ora_cmd, ora_flags);
    opt.stepper = collect_stepper(ora_cmd, ora_stepper);
    opt.out = ora_out;
    opt.n_cut_a = n_cut_a;
    opt.n_cut_b = n_cut_b;
    opt.eps = ora_eps;
    opt.convergence_check = !no_convergence;
    return qomsim::cmd_oracle(opt, std::cout, std::cerr);
  }
  if (cmp_cmd->parsed()) return qomsim::cmd_compare(cmp, std::cout, std::cerr);
  if (swp_cmd->parsed()) {
    swp.base.o = collect_overrides(swp_cmd, swp_flags);
    swp.base.stepper = collect_stepper(swp_cmd, swp_stepper);
    return qomsim::cmd_sweep(swp, std::cout, std::cerr);
  }
  if (pre_cmd->parsed()) return qomsim::cmd_preset(preset_name, std::cout, std::cerr);
  if (lst_cmd->parsed()) return qomsim::cmd_list_presets(std::cout);
  return qomsim::kExitConfigError;
}
