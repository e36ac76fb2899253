#pragma once

namespace isingimpute {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace isingimpute
