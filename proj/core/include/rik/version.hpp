#pragma once

namespace rik {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rik
