#pragma once

#include <optional>
#include <vector>

#include "qomsim/moments.hpp"
#include "qomsim/trajectory.hpp"

namespace qomsim {

inline constexpr double kDefaultG2Eps = 1e-9;

/// Equal-time second-order autocorrelation of the cavity mode from the
/// decorrelated moments: [2 <a^dag a>^2 + <a^dag^2><a^2>] / <a^dag a>^2.
/// Returns nullopt (undefined) when the population is below eps. The real
/// part is returned; the imaginary residue is expected below 1e-10 for
/// conjugate-symmetric states.
std::optional<double> g2_a(const MomentState& s, double eps = kDefaultG2Eps);

/// Same form for the mechanical mode.
std::optional<double> g2_b(const MomentState& s, double eps = kDefaultG2Eps);

/// Cross-correlation [<a^dag b><b^dag a> + <b^dag b><a^dag a> + <a^dag b^dag><b a>]
/// / (<b^dag b><a^dag a>), undefined when either population is below eps.
std::optional<double> g2_ab(const MomentState& s, double eps = kDefaultG2Eps);

enum class Statistics { sub_poissonian, poissonian, super_poissonian };
const char* to_string(Statistics s);

/// g2 < 1 - delta: sub-Poissonian; |g2 - 1| <= delta: Poissonian; else
/// super-Poissonian. Throws std::invalid_argument for NaN input.
Statistics classify(double g2, double tie_tolerance = 1e-6);

struct ObservablesRow {
  double t = 0.0;
  double n_a = 0.0;
  double n_b = 0.0;
  std::optional<double> g2_a;
  std::optional<double> g2_b;
  std::optional<double> g2_ab;
};

/// One row per sample time; undefined correlations propagate as unset fields.
std::vector<ObservablesRow> observables_series(const Trajectory& traj,
                                               double eps = kDefaultG2Eps);

}  // namespace qomsim
