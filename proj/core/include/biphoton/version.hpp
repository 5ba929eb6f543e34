#pragma once

namespace biphoton {
inline constexpr const char* kToolVersion = "1.0.0";
}
