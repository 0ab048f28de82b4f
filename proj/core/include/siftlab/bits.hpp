#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace siftlab {

// One bit per element; kept unpacked since strings stay short at desk scale.
using BitString = std::vector<uint8_t>;

inline int weight(const BitString& s) {
    return std::accumulate(s.begin(), s.end(), 0);
}

inline int xor_count(const BitString& a, const BitString& b) {
    int c = 0;
    for (size_t i = 0; i < a.size(); ++i) c += (a[i] ^ b[i]) & 1;
    return c;
}

inline std::string to_string(const BitString& s) {
    std::string out;
    out.reserve(s.size());
    for (auto b : s) out.push_back(b ? '1' : '0');
    return out;
}

inline BitString bits_from_string(const std::string& s) {
    BitString out;
    out.reserve(s.size());
    for (char c : s) out.push_back(c == '1' ? 1 : 0);
    return out;
}

} // namespace siftlab
