#pragma once

namespace dspde {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace dspde
