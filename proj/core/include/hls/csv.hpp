#pragma once

#include <cstdio>
#include <string>

namespace hls {

/// Shortest round-trippable decimal form of v. Keeps text outputs stable
/// across repeated runs of the same binary.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace hls
