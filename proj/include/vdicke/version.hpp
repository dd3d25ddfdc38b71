#pragma once

namespace vdicke {

inline constexpr char kVersion[] = "0.1.0";

} // namespace vdicke
