#pragma once

namespace rloco {
inline constexpr const char* kVersion = "0.1.0";
}
