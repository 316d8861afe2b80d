#pragma once

namespace polarmc {

inline constexpr const char* project_name = "polarmc";
inline constexpr const char* project_version = "1.0.0";

}  // namespace polarmc
