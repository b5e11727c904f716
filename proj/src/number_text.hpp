#pragma once

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>

namespace ricci::detail {

// Whole-string decimal parse. Accepts subnormals, rejects trailing junk, inf and nan.
inline std::optional<double> parse_double(const std::string& text) {
    if (text.empty()) return std::nullopt;
    const char* begin = text.c_str();
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(begin, &end);
    if (end != begin + text.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

}  // namespace ricci::detail
