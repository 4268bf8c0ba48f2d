#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace qomsim {

/// Which construction of the moment-equation right-hand side drives a run.
/// `closed` is the shipping default; `composed` assembles the same system
/// mechanically from the unclosed equations plus the decorrelation rules and
/// serves as an independent cross-check.
enum class RhsVariant { closed, composed };

const char* to_string(RhsVariant v);
std::optional<RhsVariant> rhs_variant_from_string(const std::string& s);

/// Physical rates and strengths of the driven cavity + membrane system.
/// All frequencies and rates are expressed in units of the mechanical
/// frequency omega_m, which is kept as an explicit field (default 1) so
/// dimensionful inputs also work.
struct SystemParams {
  double delta_c = 1.0;  ///< cavity detuning from the drive laser
  double omega_m = 1.0;  ///< mechanical frequency (normalization unit)
  double g_opt = 0.0;    ///< quadratic optomechanical coupling strength
  double rabi = 0.0;     ///< drive Rabi frequency
  double gamma_a = 0.0;  ///< cavity damping rate
  double gamma_b = 0.0;  ///< mechanical damping rate
  double nbar_a = 0.0;   ///< thermal photon number of the cavity reservoir
  double nbar_b = 0.0;   ///< thermal phonon number of the mechanical reservoir
};

/// Numerical run configuration. `initial_state`, when set, holds the 28
/// interleaved re/im components of a custom moment state; unset means vacuum.
struct SimConfig {
  double t_end = 50.0;
  int n_samples = 2001;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  RhsVariant rhs_variant = RhsVariant::closed;
  std::optional<std::array<double, 28>> initial_state;
};

/// Returns one message per violated invariant (empty means valid).
/// Total function: never throws, reports every violation with its field name.
std::vector<std::string> validate(const SystemParams& p);
std::vector<std::string> validate(const SimConfig& c);

/// Membrane stability margin omega_m + 4 * s * g_opt for an instantaneous
/// intracavity photon number s. The membrane is stable while the margin stays
/// positive; callers treat margin <= 0 as an instability warning.
/// Throws std::domain_error for s < 0.
double stability_margin(const SystemParams& p, double photon_number);

}  // namespace qomsim
