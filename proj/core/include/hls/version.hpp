#pragma once

namespace hls {

inline constexpr const char* kVersion = "0.1.0";

} // namespace hls
