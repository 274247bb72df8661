#pragma once

namespace fracspde {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fracspde
