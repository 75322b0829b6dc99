#pragma once

namespace dynsbm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dynsbm
