#pragma once

namespace spade4 {

inline constexpr const char* kVersion = "0.1.0";

}
