#pragma once

namespace homog {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace homog
