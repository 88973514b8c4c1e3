#pragma once

namespace lyapband {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lyapband
