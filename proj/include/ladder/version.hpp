#pragma once

namespace ladder {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ladder
