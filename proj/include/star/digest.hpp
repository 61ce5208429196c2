#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace star {

/// SHA-256 of a byte buffer as a lowercase hex string.
std::string sha256_hex(std::span<const std::uint8_t> data);
std::string sha256_hex(const std::string& data);

/// Derives a small RGB color triple from a key string. Used by the
/// synthetic frame renderer so that identical world facts always map
/// to identical pixels.
struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    bool operator==(const Rgb&) const = default;
};

Rgb color_for_key(const std::string& key);

}  // namespace star
