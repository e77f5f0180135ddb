#pragma once

namespace netsirs {

inline constexpr const char* kVersion = "0.1.0";

} // namespace netsirs
