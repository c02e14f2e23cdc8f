#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace gibbsium {

// Exact enumeration never exceeds this many configurations (2^24).
constexpr uint64_t kEnumCap = uint64_t(1) << 24;

inline uint64_t pow_u(uint64_t a, int b) {
    uint64_t r = 1;
    for (int i = 0; i < b; ++i) r *= a;
    return r;
}

inline uint64_t table_size_checked(int alphabet, int nsites) {
    uint64_t n = 1;
    for (int i = 0; i < nsites; ++i) {
        n *= (uint64_t)alphabet;
        if (n > kEnumCap) throw std::length_error("state space exceeds enumeration cap (2^24)");
    }
    return n;
}

// Mixed-radix decode: digit i (site i) cycles fastest.
inline void idx_to_digits(uint64_t idx, int nsites, int base, std::vector<int>& out) {
    out.resize(nsites);
    for (int i = 0; i < nsites; ++i) {
        out[i] = (int)(idx % base);
        idx /= base;
    }
}

inline uint64_t digits_to_idx(const std::vector<int>& digits, int base) {
    uint64_t idx = 0;
    for (int i = (int)digits.size() - 1; i >= 0; --i) idx = idx * base + digits[i];
    return idx;
}

}  // namespace gibbsium
