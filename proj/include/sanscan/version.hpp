#pragma once

namespace sanscan {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sanscan
