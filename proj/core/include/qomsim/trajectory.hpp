#pragma once

#include <limits>
#include <vector>

#include "qomsim/integrator.hpp"
#include "qomsim/moments.hpp"
#include "qomsim/params.hpp"

namespace qomsim {

/// Time grid plus one moment state per grid point, together with the inputs
/// that produced it, integrator statistics and the post-hoc invariant
/// monitors.
struct Trajectory {
  std::vector<double> times;
  std::vector<MomentState> states;

  SystemParams params;
  SimConfig sim;
  StepperConfig stepper;

  IntegratorStats stats;
  IntegrationStatus status = IntegrationStatus::ok;

  /// Fires when the membrane stability margin omega_m + 4 n_a g_opt drops
  /// to zero or below at any sample. Warning only, never an abort.
  bool stability_warning = false;
  double first_unstable_time = std::numeric_limits<double>::quiet_NaN();

  /// Worst conjugate-pair deviation and worst |Im n_a|, |Im n_b| over all
  /// samples (finite only for runs started conjugate-symmetrically).
  double max_conjugacy_dev = 0.0;

  bool ok() const { return status == IntegrationStatus::ok; }
};

/// Validates inputs (throws std::invalid_argument listing violations),
/// integrates the selected RHS variant from the configured initial state and
/// fills in the monitors.
Trajectory simulate_moments(const SystemParams& params, const SimConfig& sim,
                            const StepperConfig& stepper = {});

}  // namespace qomsim
