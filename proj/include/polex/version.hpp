#pragma once

namespace polex {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace polex
