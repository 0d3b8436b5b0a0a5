#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace gtlab {

// 12 significant digits, the precision used for all numeric text output.
inline std::string fmt_g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Same, but JSON-safe: nonfinite values become null.
inline std::string fmt_json_number(double v) {
    if (!std::isfinite(v)) return "null";
    return fmt_g12(v);
}

}  // namespace gtlab
