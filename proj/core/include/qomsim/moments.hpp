#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qomsim/params.hpp"

namespace qomsim {

using Complex = std::complex<double>;

/// The second-order state vector: all first moments, both occupation numbers,
/// the four cross moments and the four anomalous (squeezing) moments of the
/// cavity mode a and the mechanical mode b. Conjugate partners are stored as
/// independent slots; conjugacy is a monitored invariant of the evolution,
/// not enforced by construction.
struct MomentState {
  Complex m_a{};     ///< <a>
  Complex m_ad{};    ///< <a^dag>
  Complex m_b{};     ///< <b>
  Complex m_bd{};    ///< <b^dag>
  Complex n_a{};     ///< <a^dag a>  (real for physical states)
  Complex n_b{};     ///< <b^dag b>  (real for physical states)
  Complex m_abd{};   ///< <a b^dag>
  Complex m_adb{};   ///< <a^dag b>
  Complex m_ab{};    ///< <a b>
  Complex m_adbd{};  ///< <a^dag b^dag>
  Complex m_aa{};    ///< <a^2>
  Complex m_adad{};  ///< <a^dag^2>
  Complex m_bb{};    ///< <b^2>
  Complex m_bdbd{};  ///< <b^dag^2>

  static constexpr int kSlots = 14;
  static constexpr int kFlatSize = 2 * kSlots;

  static const std::array<const char*, kSlots>& slot_names();

  std::array<Complex, kSlots> slots() const;
  static MomentState from_slots(const std::array<Complex, kSlots>& s);

  /// Interleaved re/im serialization in slot order (28 reals).
  void to_flat(std::span<double, kFlatSize> out) const;
  static MomentState from_flat(std::span<const double, kFlatSize> in);
};

/// Same slot layout; each entry is the time derivative of the moment.
using MomentDerivative = MomentState;

/// Third-order truncation: <ABC> ~ <A><BC> + <AB><C> + <AC><B>.
Complex decorrelate_triple(Complex s_a, Complex s_b, Complex s_c,
                           Complex p_ab, Complex p_ac, Complex p_bc);

/// Fourth-order truncation: <ABCD> ~ <AB><CD> + <AC><BD> + <AD><BC>.
Complex decorrelate_quad(Complex p_ab, Complex p_cd, Complex p_ac,
                         Complex p_bd, Complex p_ad, Complex p_bc);

/// The closed equation set, transcribed term by term.
MomentDerivative closed_rhs(const MomentState& s, const SystemParams& p);

/// The same system assembled mechanically: the unclosed equations of motion
/// with every third/fourth-order product replaced through the decorrelation
/// rules, operators assigned left to right. Independent construction used to
/// cross-check closed_rhs.
MomentDerivative composed_rhs(const MomentState& s, const SystemParams& p);

MomentDerivative rhs(const MomentState& s, const SystemParams& p, RhsVariant v);

/// Swaps every conjugate-pair slot and conjugates all entries. A state is
/// conjugate-symmetric iff conj_flip(s) == s; the dynamics commute with this
/// involution.
MomentState conj_flip(const MomentState& s);

/// Largest deviation from conjugate symmetry, max over the six slot pairs
/// plus |Im n_a|, |Im n_b|.
double conjugacy_deviation(const MomentState& s);

/// One sample per slot drawn uniformly from the complex disc of radius 2,
/// with n_a and n_b forced real nonnegative in [0, 2].
MomentState random_moment_state(std::mt19937_64& rng);

/// Per-equation worst-case disagreement between the two RHS constructions
/// over seeded random states. Deviations are measured as
/// |closed - composed| / max(1, |closed|, |composed|).
struct RhsDiscrepancyReport {
  std::uint64_t seed = 0;
  int n_random = 0;
  double threshold = 1e-12;
  std::array<double, MomentState::kSlots> max_rel_dev{};
  std::vector<int> flagged;  ///< slots whose deviation exceeds the threshold
  std::string to_text() const;
};

/// Throws std::invalid_argument when n_random < 1. Deterministic given seed.
RhsDiscrepancyReport rhs_discrepancy_report(const SystemParams& p, int n_random,
                                            std::uint64_t seed);

/// Slots where the two constructions are expected to differ, with the
/// documented symbolic difference. Currently empty: the closed set matches
/// the mechanical composition identically on every equation.
const std::vector<std::pair<int, std::string>>& known_rhs_discrepancies();

}  // namespace qomsim
