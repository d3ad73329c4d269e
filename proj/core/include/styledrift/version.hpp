#pragma once

namespace styledrift {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace styledrift
