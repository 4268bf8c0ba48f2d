#include "qomsim/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "qomsim/config.hpp"
#include "qomsim/correlations.hpp"
#include "qomsim/csv.hpp"
#include "qomsim/lindblad.hpp"
#include "qomsim/scenarios.hpp"
#include "qomsim/trajectory.hpp"
#include "qomsim/version.hpp"

namespace qomsim {

namespace {

using nlohmann::json;

int report_errors(const std::vector<std::string>& errs, std::ostream& err) {
  for (const auto& e : errs) err << "error: " << e << "\n";
  return kExitConfigError;
}

struct ResolvedInputs {
  SystemParams params;
  SimConfig sim;
  std::string preset_name;  // empty when not a preset run
};

// default < preset < config file < explicit flag.
int resolve_inputs(const Overrides& o, ResolvedInputs& out, std::ostream& err) {
  if (o.preset_name) {
    try {
      const ScenarioPreset& sp = preset(*o.preset_name);
      out.params = sp.params;
      out.sim = sp.sim;
      out.preset_name = sp.name;
    } catch (const std::exception& e) {
      return report_errors({e.what()}, err);
    }
  }
  if (o.config_path) {
    try {
      const FileConfig cfg = parse_config_file(*o.config_path);
      if (const auto errs = apply_config(cfg, out.params, out.sim); !errs.empty())
        return report_errors(errs, err);
    } catch (const std::exception& e) {
      return report_errors({e.what()}, err);
    }
  }
  if (o.delta_c) out.params.delta_c = *o.delta_c;
  if (o.omega_m) out.params.omega_m = *o.omega_m;
  if (o.g_opt) out.params.g_opt = *o.g_opt;
  if (o.rabi) out.params.rabi = *o.rabi;
  if (o.gamma_a) out.params.gamma_a = *o.gamma_a;
  if (o.gamma_b) out.params.gamma_b = *o.gamma_b;
  if (o.nbar_a) out.params.nbar_a = *o.nbar_a;
  if (o.nbar_b) out.params.nbar_b = *o.nbar_b;
  if (o.t_end) out.sim.t_end = *o.t_end;
  if (o.n_samples) out.sim.n_samples = *o.n_samples;
  if (o.rel_tol) out.sim.rel_tol = *o.rel_tol;
  if (o.abs_tol) out.sim.abs_tol = *o.abs_tol;
  if (o.rhs_variant) {
    if (const auto v = rhs_variant_from_string(*o.rhs_variant)) {
      out.sim.rhs_variant = *v;
    } else {
      return report_errors({"rhs_variant: expected closed|composed, got '" +
                            *o.rhs_variant + "'"}, err);
    }
  }
  if (o.initial_state) {
    if (*o.initial_state == "vacuum") {
      out.sim.initial_state.reset();
    } else {
      try {
        out.sim.initial_state = load_flat_state_json(*o.initial_state);
      } catch (const std::exception& e) {
        return report_errors({e.what()}, err);
      }
    }
  }

  std::vector<std::string> errs = validate(out.params);
  const auto sim_errs = validate(out.sim);
  errs.insert(errs.end(), sim_errs.begin(), sim_errs.end());
  if (!errs.empty()) return report_errors(errs, err);
  return kExitOk;
}

int apply_stepper_overrides(const StepperOverrides& so, StepperConfig& cfg,
                            std::ostream& err) {
  if (so.mode) {
    if (*so.mode == "adaptive") cfg.mode = StepMode::adaptive_embedded;
    else if (*so.mode == "fixed") cfg.mode = StepMode::fixed_rk4;
    else return report_errors({"mode: expected adaptive|fixed, got '" + *so.mode + "'"}, err);
  }
  if (so.h_init) cfg.h_init = *so.h_init;
  if (so.h_min) cfg.h_min = *so.h_min;
  if (so.h_max) cfg.h_max = *so.h_max;
  if (so.max_steps) cfg.max_steps = *so.max_steps;
  if (const auto errs = validate(cfg); !errs.empty()) return report_errors(errs, err);
  return kExitOk;
}

json params_to_json(const SystemParams& p) {
  return json{{"delta_c", p.delta_c},   {"omega_m", p.omega_m},
              {"g_opt", p.g_opt},       {"rabi", p.rabi},
              {"gamma_a", p.gamma_a},   {"gamma_b", p.gamma_b},
              {"nbar_a", p.nbar_a},     {"nbar_b", p.nbar_b}};
}

void params_from_json(const json& j, SystemParams& p) {
  p.delta_c = j.at("delta_c").get<double>();
  p.omega_m = j.at("omega_m").get<double>();
  p.g_opt = j.at("g_opt").get<double>();
  p.rabi = j.at("rabi").get<double>();
  p.gamma_a = j.at("gamma_a").get<double>();
  p.gamma_b = j.at("gamma_b").get<double>();
  p.nbar_a = j.at("nbar_a").get<double>();
  p.nbar_b = j.at("nbar_b").get<double>();
}

json sim_to_json(const SimConfig& c) {
  json j{{"t_end", c.t_end},
         {"n_samples", c.n_samples},
         {"rel_tol", c.rel_tol},
         {"abs_tol", c.abs_tol},
         {"rhs_variant", to_string(c.rhs_variant)}};
  if (c.initial_state) j["initial_state"] = *c.initial_state;
  else j["initial_state"] = "vacuum";
  return j;
}

void sim_from_json(const json& j, SimConfig& c) {
  c.t_end = j.at("t_end").get<double>();
  c.n_samples = j.at("n_samples").get<int>();
  c.rel_tol = j.at("rel_tol").get<double>();
  c.abs_tol = j.at("abs_tol").get<double>();
  const auto v = rhs_variant_from_string(j.at("rhs_variant").get<std::string>());
  if (!v) throw std::invalid_argument("sidecar: bad rhs_variant");
  c.rhs_variant = *v;
  const auto& init = j.at("initial_state");
  if (init.is_string()) {
    c.initial_state.reset();
  } else {
    std::array<double, MomentState::kFlatSize> flat{};
    if (!init.is_array() || init.size() != flat.size())
      throw std::invalid_argument("sidecar: bad initial_state");
    for (std::size_t i = 0; i < flat.size(); ++i) flat[i] = init[i].get<double>();
    c.initial_state = flat;
  }
}

json stepper_to_json(const StepperConfig& c) {
  return json{{"mode", c.mode == StepMode::adaptive_embedded ? "adaptive" : "fixed"},
              {"h_init", c.h_init},
              {"h_min", c.h_min},
              {"h_max", c.h_max},
              {"max_steps", c.max_steps}};
}

void stepper_from_json(const json& j, StepperConfig& c) {
  c.mode = j.at("mode").get<std::string>() == "fixed" ? StepMode::fixed_rk4
                                                      : StepMode::adaptive_embedded;
  c.h_init = j.at("h_init").get<double>();
  c.h_min = j.at("h_min").get<double>();
  c.h_max = j.at("h_max").get<double>();
  c.max_steps = j.at("max_steps").get<long>();
}

json stats_to_json(const IntegratorStats& s) {
  return json{{"accepted", s.accepted}, {"rejected", s.rejected}, {"rhs_evals", s.rhs_evals}};
}

std::string sidecar_path(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  p.replace_extension(".json");
  return p.string();
}

int write_text_file(const std::string& path, const std::string& content,
                    std::ostream& err) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    err << "error: cannot open output file: " << path << "\n";
    return kExitConfigError;
  }
  f << content;
  if (!f) {
    err << "error: failed writing: " << path << "\n";
    return kExitConfigError;
  }
  return kExitOk;
}

std::vector<std::array<std::optional<double>, 3>> g2_columns(
    const std::vector<ObservablesRow>& rows) {
  std::vector<std::array<std::optional<double>, 3>> g2;
  g2.reserve(rows.size());
  for (const auto& r : rows) g2.push_back({r.g2_a, r.g2_b, r.g2_ab});
  return g2;
}

struct SimulateOutcome {
  int exit_code = kExitOk;
  Trajectory traj;
  std::vector<ObservablesRow> rows;
};

// Shared by simulate and sweep points: run, write CSV + sidecar.
SimulateOutcome run_and_write(const SystemParams& params, const SimConfig& sim,
                              const StepperConfig& stepper, const std::string& csv_path,
                              const std::string& preset_name, bool evaluate_preset_claims,
                              std::ostream& msg, std::ostream& err) {
  SimulateOutcome out;
  try {
    out.traj = simulate_moments(params, sim, stepper);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    out.exit_code = kExitConfigError;
    return out;
  }
  out.rows = observables_series(out.traj);

  std::ostringstream csv;
  write_observables_csv(csv, out.traj.times, out.traj.states, g2_columns(out.rows));
  if (const int rc = write_text_file(csv_path, csv.str(), err); rc != kExitOk) {
    out.exit_code = rc;
    return out;
  }

  json side;
  side["version"] = kVersion;
  side["kind"] = "simulate";
  side["params"] = params_to_json(params);
  side["sim"] = sim_to_json(sim);
  side["stepper"] = stepper_to_json(out.traj.stepper);
  side["stats"] = stats_to_json(out.traj.stats);
  side["status"] = to_string(out.traj.status);
  side["rhs_variant"] = to_string(sim.rhs_variant);
  side["stability_warning"] = out.traj.stability_warning;
  if (out.traj.stability_warning)
    side["first_unstable_time"] = out.traj.first_unstable_time;
  side["invariants"] = json{{"max_conjugacy_dev", out.traj.max_conjugacy_dev}};
  if (!preset_name.empty()) side["preset"] = preset_name;

  if (!preset_name.empty() && evaluate_preset_claims) {
    const ScenarioPreset& sp = preset(preset_name);
    if (!sp.claims.empty()) {
      std::map<std::string, std::vector<ObservablesRow>> cache;
      const ObservablesFetcher fetch = [&](const std::string& ref) {
        auto it = cache.find(ref);
        if (it != cache.end()) return it->second;
        SimConfig rsim = sim;
        rsim.initial_state.reset();
        const Trajectory rt = simulate_moments(preset(ref).params, rsim, stepper);
        return cache.emplace(ref, observables_series(rt)).first->second;
      };
      json claims = json::array();
      for (const auto& cr : evaluate_claims(sp, out.rows, fetch)) {
        claims.push_back(json{{"text", cr.claim.text},
                              {"pass", cr.pass},
                              {"measured", cr.measured},
                              {"detail", cr.detail}});
        msg << "claim [" << preset_name << "] " << (cr.pass ? "PASS" : "FAIL") << ": "
            << cr.claim.text << " (" << cr.detail << ")\n";
      }
      side["claims"] = claims;
    }
  }

  if (const int rc = write_text_file(sidecar_path(csv_path), side.dump(2) + "\n", err);
      rc != kExitOk) {
    out.exit_code = rc;
    return out;
  }

  if (out.traj.stability_warning)
    err << "warning: stability margin reached zero at t = "
        << out.traj.first_unstable_time << " (run continued)\n";
  if (out.traj.status != IntegrationStatus::ok) {
    err << "error: integration aborted: " << to_string(out.traj.status)
        << " (partial trajectory written)\n";
    out.exit_code = kExitNumericalFailure;
  }
  return out;
}

}  // namespace

int cmd_simulate(const SimulateOptions& opt, std::ostream& msg, std::ostream& err) {
  ResolvedInputs in;
  StepperConfig stepper;

  if (opt.from_sidecar) {
    try {
      std::ifstream f(*opt.from_sidecar);
      if (!f) throw std::invalid_argument("cannot open sidecar: " + *opt.from_sidecar);
      json j;
      f >> j;
      params_from_json(j.at("params"), in.params);
      sim_from_json(j.at("sim"), in.sim);
      stepper_from_json(j.at("stepper"), stepper);
      if (j.contains("preset")) in.preset_name = j.at("preset").get<std::string>();
    } catch (const std::exception& e) {
      return report_errors({e.what()}, err);
    }
  } else {
    if (const int rc = resolve_inputs(opt.o, in, err); rc != kExitOk) return rc;
    if (const int rc = apply_stepper_overrides(opt.stepper, stepper, err); rc != kExitOk)
      return rc;
  }

  return run_and_write(in.params, in.sim, stepper, opt.out, in.preset_name,
                       /*evaluate_preset_claims=*/true, msg, err)
      .exit_code;
}

int cmd_oracle(const OracleOptions& opt, std::ostream& msg, std::ostream& err) {
  ResolvedInputs in;
  if (const int rc = resolve_inputs(opt.o, in, err); rc != kExitOk) return rc;

  const FockSpace space{opt.n_cut_a, opt.n_cut_b};
  if (const auto errs = validate(space); !errs.empty()) return report_errors(errs, err);

  StepperConfig stepper = oracle_stepper_defaults();
  if (opt.o.rel_tol) stepper.rel_tol = *opt.o.rel_tol;
  if (opt.o.abs_tol) stepper.abs_tol = *opt.o.abs_tol;
  if (const int rc = apply_stepper_overrides(opt.stepper, stepper, err); rc != kExitOk)
    return rc;

  const auto grid = make_time_grid(in.sim.t_end, in.sim.n_samples);

  OracleTrajectory run;
  try {
    run = run_oracle(in.params, space, grid, stepper, opt.eps);
  } catch (const std::exception& e) {
    return report_errors({e.what()}, err);
  }

  std::ostringstream csv;
  std::vector<std::array<std::optional<double>, 3>> g2;
  g2.reserve(run.g2.size());
  for (const auto& g : run.g2) g2.push_back({g.g2_a, g.g2_b, g.g2_ab});
  write_observables_csv(csv, run.times, run.moments, g2);
  if (const int rc = write_text_file(opt.out, csv.str(), err); rc != kExitOk) return rc;

  json side;
  side["version"] = kVersion;
  side["kind"] = "oracle";
  side["params"] = params_to_json(in.params);
  side["sim"] = sim_to_json(in.sim);
  side["stepper"] = stepper_to_json(stepper);
  side["stats"] = stats_to_json(run.stats);
  side["status"] = to_string(run.status);
  side["trace_abort"] = run.trace_abort;
  side["cutoffs"] = json{{"n_cut_a", space.n_cut_a}, {"n_cut_b", space.n_cut_b}};
  side["eps"] = opt.eps;
  side["diagnostics"] = json{{"max_trace_dev", run.worst.trace_dev},
                             {"max_herm_dev", run.worst.herm_dev},
                             {"min_diag", run.worst.min_diag}};

  if (opt.convergence_check && run.ok() && !run.moments.empty()) {
    const FockSpace bumped{space.n_cut_a + 4, space.n_cut_b + 4};
    OracleTrajectory hi;
    try {
      hi = run_oracle(in.params, bumped, grid, stepper, opt.eps);
    } catch (const std::exception& e) {
      return report_errors({e.what()}, err);
    }
    const double base_end = run.moments.back().n_a.real();
    const double hi_end = hi.moments.empty() ? std::nan("") : hi.moments.back().n_a.real();
    const double delta = std::abs(base_end - hi_end);
    const bool under_resolved = !(delta < 1e-6);
    side["convergence"] = json{{"n_cut_a_bumped", bumped.n_cut_a},
                               {"n_cut_b_bumped", bumped.n_cut_b},
                               {"n_a_end_base", base_end},
                               {"n_a_end_bumped", hi_end},
                               {"delta", delta},
                               {"under_resolved", under_resolved}};
    if (under_resolved)
      err << "warning: under-resolved: cutoff bump changes n_a(t_end) by " << delta
          << "\n";
  }

  if (const int rc = write_text_file(sidecar_path(opt.out), side.dump(2) + "\n", err);
      rc != kExitOk)
    return rc;

  if (run.trace_abort) {
    err << "error: oracle evolution aborted: trace drift exceeded "
        << kTraceAbortThreshold << " (partial data written)\n";
    return kExitNumericalFailure;
  }
  if (run.status != IntegrationStatus::ok) {
    err << "error: integration aborted: " << to_string(run.status)
        << " (partial data written)\n";
    return kExitNumericalFailure;
  }
  msg << "oracle run written to " << opt.out << "\n";
  return kExitOk;
}

int cmd_compare(const CompareOptions& opt, std::ostream& msg, std::ostream& err) {
  CsvTable a, b;
  try {
    a = read_csv_file(opt.file_a);
    b = read_csv_file(opt.file_b);
  } catch (const std::exception& e) {
    return report_errors({e.what()}, err);
  }
  if (a.columns != b.columns)
    return report_errors({"schema mismatch between '" + opt.file_a + "' and '" +
                          opt.file_b + "'"}, err);
  if (a.rows.size() != b.rows.size())
    return report_errors({"row count mismatch: " + std::to_string(a.rows.size()) +
                          " vs " + std::to_string(b.rows.size())}, err);
  if (!a.columns.empty() && a.columns[0] == "t") {
    for (std::size_t r = 0; r < a.rows.size(); ++r)
      if (!(a.rows[r][0].has_value() && b.rows[r][0].has_value() &&
            *a.rows[r][0] == *b.rows[r][0]))
        return report_errors({"time grids differ at row " + std::to_string(r)}, err);
  }

  bool all_ok = true;
  msg << "column,max_abs_dev,max_rel_dev,defined_mismatches,within_tolerance\n";
  for (std::size_t c = 0; c < a.columns.size(); ++c) {
    double max_abs = 0.0, max_rel = 0.0;
    long mismatches = 0;
    bool ok = true;
    for (std::size_t r = 0; r < a.rows.size(); ++r) {
      const auto& va = a.rows[r][c];
      const auto& vb = b.rows[r][c];
      if (va.has_value() != vb.has_value()) {
        ++mismatches;
        ok = false;
        continue;
      }
      if (!va.has_value()) continue;
      const double dev = std::abs(*va - *vb);
      const double scale = std::max(std::abs(*va), std::abs(*vb));
      max_abs = std::max(max_abs, dev);
      if (scale > 0.0) max_rel = std::max(max_rel, dev / scale);
      if (dev > opt.abs_tol + opt.rel_tol * scale) ok = false;
    }
    all_ok = all_ok && ok;
    msg << a.columns[c] << ',' << format_g17(max_abs) << ',' << format_g17(max_rel)
        << ',' << mismatches << ',' << (ok ? "yes" : "no") << "\n";
  }
  return all_ok ? kExitOk : kExitComparisonFailure;
}

namespace {

const std::map<std::string, double SystemParams::*>& sweepable_fields() {
  static const std::map<std::string, double SystemParams::*> fields = {
      {"delta_c", &SystemParams::delta_c}, {"omega_m", &SystemParams::omega_m},
      {"g_opt", &SystemParams::g_opt},     {"rabi", &SystemParams::rabi},
      {"gamma_a", &SystemParams::gamma_a}, {"gamma_b", &SystemParams::gamma_b},
      {"nbar_a", &SystemParams::nbar_a},   {"nbar_b", &SystemParams::nbar_b}};
  return fields;
}

}  // namespace

int cmd_sweep(const SweepOptions& opt, std::ostream& msg, std::ostream& err) {
  const auto field_it = sweepable_fields().find(opt.param);
  if (field_it == sweepable_fields().end()) {
    std::string valid;
    for (const auto& [k, _] : sweepable_fields()) valid += " " + k;
    return report_errors({"unknown sweep parameter '" + opt.param + "'; valid:" + valid},
                         err);
  }
  if (opt.values.empty()) return report_errors({"empty sweep value list"}, err);

  std::vector<double> values(opt.values.size());
  for (std::size_t i = 0; i < opt.values.size(); ++i) {
    try {
      std::size_t pos = 0;
      values[i] = std::stod(opt.values[i], &pos);
      if (pos != opt.values[i].size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      return report_errors({"cannot parse sweep value '" + opt.values[i] + "'"}, err);
    }
  }

  ResolvedInputs base;
  if (const int rc = resolve_inputs(opt.base.o, base, err); rc != kExitOk) return rc;
  StepperConfig stepper;
  if (const int rc = apply_stepper_overrides(opt.base.stepper, stepper, err);
      rc != kExitOk)
    return rc;

  std::error_code ec;
  std::filesystem::create_directories(opt.out_dir, ec);
  if (ec) return report_errors({"cannot create output directory: " + opt.out_dir}, err);

  struct PointResult {
    int exit_code = kExitOk;
    std::string file;
    std::string messages;
  };
  std::vector<PointResult> results(values.size());

  const int jobs = std::clamp<int>(opt.jobs, 1, static_cast<int>(values.size()));
  std::atomic<std::size_t> next{0};

  const auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= values.size()) return;
      SystemParams p = base.params;
      p.*(field_it->second) = values[i];
      if (const auto errs = validate(p); !errs.empty()) {
        results[i].exit_code = kExitConfigError;
        for (const auto& e : errs) results[i].messages += "error: " + e + "\n";
        continue;
      }
      const std::string file = opt.param + "_" + opt.values[i] + ".csv";
      const std::string path = (std::filesystem::path(opt.out_dir) / file).string();
      std::ostringstream point_msg, point_err;
      const SimulateOutcome r =
          run_and_write(p, base.sim, stepper, path, /*preset_name=*/"",
                        /*evaluate_preset_claims=*/false, point_msg, point_err);
      results[i].exit_code = r.exit_code;
      results[i].file = file;
      results[i].messages = point_msg.str() + point_err.str();
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  int exit_code = kExitOk;
  json index;
  index["param"] = opt.param;
  json files = json::object();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!results[i].messages.empty()) err << results[i].messages;
    exit_code = std::max(exit_code, results[i].exit_code);
    if (results[i].exit_code == kExitOk || results[i].exit_code == kExitNumericalFailure)
      files[opt.values[i]] = results[i].file;
  }
  index["files"] = files;
  index["version"] = kVersion;
  const std::string index_path =
      (std::filesystem::path(opt.out_dir) / "index.json").string();
  if (const int rc = write_text_file(index_path, index.dump(2) + "\n", err);
      rc != kExitOk)
    return std::max(exit_code, rc);

  msg << "sweep over " << opt.param << ": " << values.size() << " runs in "
      << opt.out_dir << "\n";
  return exit_code;
}

int cmd_preset(const std::string& name, std::ostream& msg, std::ostream& err) {
  try {
    const ScenarioPreset& sp = preset(name);
    msg << "# preset " << sp.name << "\n" << to_config_text(sp.params, sp.sim);
    return kExitOk;
  } catch (const std::exception& e) {
    return report_errors({e.what()}, err);
  }
}

int cmd_list_presets(std::ostream& msg) {
  for (const auto& sp : all_presets()) {
    const SystemParams& p = sp.params;
    msg << sp.name << "  delta_c=" << p.delta_c << " g_opt=" << p.g_opt
        << " rabi=" << p.rabi << " gamma_a=" << p.gamma_a << " gamma_b=" << p.gamma_b
        << " nbar_a=" << p.nbar_a << " nbar_b=" << p.nbar_b;
    if (!sp.claims.empty()) msg << "  [" << sp.claims.size() << " claim(s)]";
    msg << "\n";
  }
  return kExitOk;
}

}  // namespace qomsim
