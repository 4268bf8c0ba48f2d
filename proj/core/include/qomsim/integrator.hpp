#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace qomsim {

enum class StepMode { adaptive_embedded, fixed_rk4 };

/// Stepper controls. In adaptive mode h_init seeds the first step and
/// [h_min, h_max] bound every step; in fixed mode h_init is the target
/// substep size within each output interval.
struct StepperConfig {
  StepMode mode = StepMode::adaptive_embedded;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double h_init = 1e-3;
  double h_min = 1e-13;
  double h_max = 1.0;
  long max_steps = 50'000'000;
};

std::vector<std::string> validate(const StepperConfig& c);

enum class IntegrationStatus { ok, step_underflow, non_finite_state, max_steps_exceeded };
const char* to_string(IntegrationStatus s);

struct IntegratorStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
};

using RhsFn = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// Samples of a run. On abort the vectors hold the grid points reached so
/// far and `status` carries the reason; times.size() == states.size() always.
struct IntegrationResult {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  IntegratorStats stats;
  IntegrationStatus status = IntegrationStatus::ok;
};

/// Integrates dy/dt = f(t, y) across t_grid, emitting the state exactly at
/// every grid point (steps are shortened to land on them; no interpolation).
/// Adaptive mode runs an embedded Dormand-Prince 5(4) pair with the mixed
/// error norm max_i |dy_i| / (abs_tol + rel_tol * |y_i|) <= 1 for accepted
/// steps and step-size factors clamped to [0.2, 5]. Fixed mode takes
/// ceil(interval / h_init) classical RK4 substeps per interval. Bitwise
/// deterministic for identical inputs.
IntegrationResult integrate(const RhsFn& f, std::span<const double> y0,
                            std::span<const double> t_grid, const StepperConfig& cfg);

/// Uniform grid 0..t_end with n_samples points (t[k] = t_end * k / (n-1)).
std::vector<double> make_time_grid(double t_end, int n_samples);

}  // namespace qomsim
