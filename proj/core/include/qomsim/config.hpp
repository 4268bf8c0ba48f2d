#pragma once

#include <map>
#include <string>
#include <vector>

#include "qomsim/params.hpp"

namespace qomsim {

/// Raw `key = value` pairs from a config file (one per line, '#' comments).
using FileConfig = std::map<std::string, std::string>;

/// Parses config text. Throws std::invalid_argument on malformed lines
/// (missing '=', empty key) with the line number.
FileConfig parse_config_text(const std::string& text);

/// Reads and parses a config file. Throws std::invalid_argument when the
/// file cannot be opened.
FileConfig parse_config_file(const std::string& path);

/// The accepted keys: the physical parameter fields plus the run fields.
const std::vector<std::string>& config_keys();

/// Applies parsed values onto params/sim. Returns one message per problem
/// (unknown key, unparseable value); empty means fully applied.
/// `initial_state = <path>` is resolved by loading a JSON array of 28 reals.
std::vector<std::string> apply_config(const FileConfig& cfg, SystemParams& params,
                                      SimConfig& sim);

/// Serializes params + sim in the config-file format (round-trips through
/// parse_config_text / apply_config).
std::string to_config_text(const SystemParams& params, const SimConfig& sim);

}  // namespace qomsim
