#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qomsim/correlations.hpp"
#include "qomsim/params.hpp"
#include "qomsim/trajectory.hpp"

namespace qomsim {

/// Machine-checkable qualitative assertions attached to presets. Every check
/// is a pure function of observables tables, so claim results are replayable
/// from the CSV output alone.
enum class ClaimKind {
  max_na_below_preset,    ///< max_t n_a < max_t n_a of the referenced preset
  nb_saturated_at_end,    ///< |d n_b/dt|(t_end) < threshold * omega_m * nbar_b
  min_g2a_at_least,       ///< min over defined times of g2_a >= threshold
  attains_g2a_below,      ///< g2_a < threshold at some defined time
};

struct Claim {
  ClaimKind kind;
  double threshold = 0.0;
  std::string ref_preset;  ///< only for max_na_below_preset
  std::string text;        ///< human-readable statement
};

struct ClaimResult {
  Claim claim;
  bool pass = false;
  double measured = 0.0;
  std::string detail;
};

/// Named parameter bundle reproducing one figure panel. All presets start
/// from vacuum and use the default grid (t in [0, 50], 2001 samples).
struct ScenarioPreset {
  std::string name;
  SystemParams params;
  SimConfig sim;
  std::vector<Claim> claims;
};

const std::vector<ScenarioPreset>& all_presets();

/// Throws std::invalid_argument for unknown names; the message lists every
/// available preset.
const ScenarioPreset& preset(const std::string& name);

using ObservablesFetcher =
    std::function<std::vector<ObservablesRow>(const std::string& preset_name)>;

/// Evaluates a preset's claims against an observables table. `fetch` supplies
/// the table of any referenced preset (cross-preset claims).
std::vector<ClaimResult> evaluate_claims(const ScenarioPreset& p,
                                         const std::vector<ObservablesRow>& rows,
                                         const ObservablesFetcher& fetch);

struct PresetRun {
  Trajectory traj;
  std::vector<ObservablesRow> rows;
  std::vector<ClaimResult> claims;
};

/// Runs the preset deterministically with the requested RHS variant and
/// evaluates its claims (referenced presets are run on demand).
PresetRun run_preset(const std::string& name, RhsVariant variant = RhsVariant::closed);

}  // namespace qomsim
