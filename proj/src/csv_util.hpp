#pragma once

#include <cstdio>
#include <string>

namespace multieit::detail {

// locale-independent %.*g with fixed digit count (byte-deterministic output)
inline void append_sig(std::string& out, double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    out += buf;
}

} // namespace multieit::detail
