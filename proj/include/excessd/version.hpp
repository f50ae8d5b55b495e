#pragma once

namespace excessd {

inline constexpr const char* kVersion = "0.1.0";

} // namespace excessd
