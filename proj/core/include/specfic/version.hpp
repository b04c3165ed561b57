#pragma once

namespace specfic {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace specfic
