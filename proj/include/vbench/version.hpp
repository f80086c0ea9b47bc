#pragma once

namespace vbench {

inline constexpr const char* kVersion = "0.1.0";

} // namespace vbench
