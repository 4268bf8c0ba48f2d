#include "qomsim/trajectory.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qomsim {

namespace {

void throw_if_invalid(const std::vector<std::string>& errs, const char* what) {
  if (errs.empty()) return;
  std::ostringstream os;
  os << what << ":";
  for (const auto& e : errs) os << " " << e << ";";
  throw std::invalid_argument(os.str());
}

}  // namespace

Trajectory simulate_moments(const SystemParams& params, const SimConfig& sim,
                            const StepperConfig& stepper_in) {
  throw_if_invalid(validate(params), "simulate_moments: invalid params");
  throw_if_invalid(validate(sim), "simulate_moments: invalid sim config");

  StepperConfig stepper = stepper_in;
  stepper.rel_tol = sim.rel_tol;
  stepper.abs_tol = sim.abs_tol;
  throw_if_invalid(validate(stepper), "simulate_moments: invalid stepper config");

  const auto grid = make_time_grid(sim.t_end, sim.n_samples);

  std::array<double, MomentState::kFlatSize> y0{};
  if (sim.initial_state) y0 = *sim.initial_state;

  const RhsFn f = [&params, variant = sim.rhs_variant](
                      double, std::span<const double> y, std::span<double> dydt) {
    const auto s = MomentState::from_flat(
        std::span<const double, MomentState::kFlatSize>(y.data(), MomentState::kFlatSize));
    const MomentDerivative d = rhs(s, params, variant);
    d.to_flat(std::span<double, MomentState::kFlatSize>(dydt.data(), MomentState::kFlatSize));
  };

  IntegrationResult raw = integrate(f, y0, grid, stepper);

  Trajectory traj;
  traj.params = params;
  traj.sim = sim;
  traj.stepper = stepper;
  traj.stats = raw.stats;
  traj.status = raw.status;
  traj.times = std::move(raw.times);
  traj.states.reserve(raw.states.size());
  for (const auto& flat : raw.states)
    traj.states.push_back(MomentState::from_flat(
        std::span<const double, MomentState::kFlatSize>(flat.data(), MomentState::kFlatSize)));

  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const MomentState& s = traj.states[k];
    traj.max_conjugacy_dev = std::max(traj.max_conjugacy_dev, conjugacy_deviation(s));
    const double n_a = std::max(0.0, s.n_a.real());
    if (!traj.stability_warning && stability_margin(params, n_a) <= 0.0) {
      traj.stability_warning = true;
      traj.first_unstable_time = traj.times[k];
    }
  }
  return traj;
}

}  // namespace qomsim
