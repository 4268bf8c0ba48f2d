#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qomsim/moments.hpp"

namespace qomsim {

/// Fixed observables schema shared by the closure and oracle paths.
extern const char* const kObservablesHeader;

/// Shortest-exact decimal for doubles (17 significant digits).
std::string format_g17(double v);

/// Writes the observables CSV: one row per sample, floats at 17 significant
/// digits, undefined correlations as empty fields.
void write_observables_csv(std::ostream& os, std::span<const double> times,
                           std::span<const MomentState> states,
                           std::span<const std::array<std::optional<double>, 3>> g2);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> rows;  ///< nullopt = empty field
};

/// Parses a CSV with a header row. Throws std::invalid_argument on ragged
/// rows or unparseable numbers.
CsvTable read_csv(std::istream& is);
CsvTable read_csv_file(const std::string& path);

/// Loads a moment state stored as a JSON array of 28 reals (interleaved
/// re/im in slot order). Throws std::invalid_argument on shape mismatch.
std::array<double, MomentState::kFlatSize> load_flat_state_json(const std::string& path);

}  // namespace qomsim
