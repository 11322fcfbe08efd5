#pragma once

namespace freeconv {

inline constexpr const char* version = "0.1.0";

}  // namespace freeconv
