#include "star/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <stdexcept>

namespace star {

std::string sha256_hex(std::span<const std::uint8_t> data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int md_len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &md_len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(md_len * 2);
    for (unsigned int i = 0; i < md_len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0x0f]);
    }
    return out;
}

std::string sha256_hex(const std::string& data) {
    return sha256_hex(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

Rgb color_for_key(const std::string& key) {
    const std::string h = sha256_hex(key);
    auto byte_at = [&](int i) {
        return static_cast<std::uint8_t>(std::stoi(h.substr(i * 2, 2), nullptr, 16));
    };
    return Rgb{byte_at(0), byte_at(1), byte_at(2)};
}

}  // namespace star
