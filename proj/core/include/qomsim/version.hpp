#pragma once

namespace qomsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qomsim
