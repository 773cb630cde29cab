#pragma once

namespace actevo {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace actevo
