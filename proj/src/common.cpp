#include "batchps/common.hpp"

#include <cmath>

namespace batchps {

double binomial(int b, int l) {
    if (l < 0 || l > b) return 0.0;
    if (l == 0 || l == b) return 1.0;
    if (l > b - l) l = b - l;
    if (b <= 40) {
        double r = 1.0;
        for (int i = 1; i <= l; ++i) r = r * double(b - l + i) / double(i);
        return r;
    }
    return std::exp(std::lgamma(b + 1.0) - std::lgamma(l + 1.0) -
                    std::lgamma(b - l + 1.0));
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

}  // namespace batchps
