#pragma once

namespace treedisp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace treedisp
