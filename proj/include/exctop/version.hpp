#pragma once

namespace exctop {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "exctop";

}  // namespace exctop
