#pragma once

namespace qforge {
inline constexpr const char* kVersion = "0.1.0";
}
