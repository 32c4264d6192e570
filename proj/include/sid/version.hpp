#pragma once

namespace sid {
inline constexpr const char* kVersion = "0.1.0";
}
