#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace whcn {

// Shortest decimal form that parses back to the exact same double. All text
// formats in the project rely on this for bit-exact roundtrips.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view tok) {
    double v = 0.0;
    const char* end = tok.data() + tok.size();
    auto res = std::from_chars(tok.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) return std::nullopt;
    return v;
}

inline std::optional<std::int64_t> parse_int(std::string_view tok) {
    std::int64_t v = 0;
    const char* end = tok.data() + tok.size();
    auto res = std::from_chars(tok.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) return std::nullopt;
    return v;
}

}  // namespace whcn
