#pragma once

namespace lrb {

inline constexpr const char* kToolName = "lrb";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace lrb
