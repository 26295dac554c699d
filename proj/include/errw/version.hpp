// version.hpp - library version string, embedded in every output file header.
#pragma once

namespace errw {

inline constexpr const char* kVersion = "errw 0.1.0";

} // namespace errw
