#pragma once

namespace relfp {
inline constexpr const char* kVersion = "0.1.0";
}
