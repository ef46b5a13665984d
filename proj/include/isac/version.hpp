#pragma once

namespace isac {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace isac
