#pragma once

namespace gridfreq {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gridfreq
