#pragma once

#include <bit>
#include <cstdint>
#include <string>

#include "cascan/errors.hpp"

namespace cascan {

inline constexpr uint64_t bit_mask(int width) {
    return width >= 64 ? ~uint64_t{0} : (uint64_t{1} << width) - 1;
}

// Reverse the low `width` bits of v.
inline constexpr uint64_t reverse_bits(uint64_t v, int width) {
    uint64_t out = 0;
    for (int i = 0; i < width; ++i) {
        out = (out << 1) | ((v >> i) & 1);
    }
    return out;
}

// FNV-1a, used for checkpoint fingerprints and checksums.
inline uint64_t fnv1a(const void* data, size_t len, uint64_t seed = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = seed;
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

inline std::string to_hex(uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

inline uint64_t parse_u64(const std::string& s) {
    if (s.empty()) throw domain_error("expected an unsigned integer, got empty string");
    uint64_t v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') throw domain_error("invalid unsigned integer: " + s);
        uint64_t d = static_cast<uint64_t>(c - '0');
        if (v > (~uint64_t{0} - d) / 10) throw domain_error("unsigned integer overflow: " + s);
        v = v * 10 + d;
    }
    return v;
}

} // namespace cascan
