#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace rrlab {

inline uint64_t fnv1a64(const void* data, size_t n, uint64_t seed = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = seed;
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline uint64_t fnv1a64(std::string_view s, uint64_t seed = 0xcbf29ce484222325ull) {
    return fnv1a64(s.data(), s.size(), seed);
}

inline std::string to_hex(uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

template <typename Derived>
uint64_t hash_matrix(const Eigen::MatrixBase<Derived>& m, uint64_t seed = 0xcbf29ce484222325ull) {
    using S = typename Derived::Scalar;
    uint64_t h = seed;
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            S v = m(r, c);
            h = fnv1a64(&v, sizeof(S), h);
        }
    return h;
}

}  // namespace rrlab
