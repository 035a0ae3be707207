#pragma once

namespace mem3d {

inline constexpr const char* kVersion = "0.1.0";

} // namespace mem3d
