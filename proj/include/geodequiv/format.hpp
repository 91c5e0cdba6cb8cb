#pragma once

#include <array>
#include <charconv>
#include <string>

namespace geodequiv {

/// Shortest round-trip decimal text for a double.
inline std::string format_double(double v) {
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

}  // namespace geodequiv
