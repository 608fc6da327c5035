#pragma once

namespace glocalkd {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace glocalkd
