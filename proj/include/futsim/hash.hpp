#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace futsim {

// 64-bit FNV-1a. Used for stable content hashes of dags, scripts and traces.
constexpr uint64_t fnv1a64_offset = 14695981039346656037ull;
constexpr uint64_t fnv1a64_prime = 1099511628211ull;

constexpr uint64_t fnv1a64(std::string_view data, uint64_t h = fnv1a64_offset) {
    for (unsigned char c : data) {
        h ^= c;
        h *= fnv1a64_prime;
    }
    return h;
}

inline std::string hash_hex(uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

} // namespace futsim
