#pragma once

namespace wpc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace wpc
