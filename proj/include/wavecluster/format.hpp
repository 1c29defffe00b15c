#pragma once

#include <charconv>
#include <string>

#include "wavecluster/errors.hpp"

namespace wavecluster {

/// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s, const std::string& context) {
    double v = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw DataError("unparseable number '" + s + "' in " + context);
    return v;
}

} // namespace wavecluster
