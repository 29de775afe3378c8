#pragma once

namespace torres {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace torres
