#pragma once

namespace hillgate {
inline constexpr const char* kVersion = "0.1.0";
}
