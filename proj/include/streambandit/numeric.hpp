#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace streambandit {

// x^k by binary exponentiation; exact products for the small integer
// exponents used by the recursions (m + 1 <= ~20).
constexpr double ipow(double x, unsigned k) {
    double r = 1.0;
    while (k != 0) {
        if (k & 1u) r *= x;
        x *= x;
        k >>= 1;
    }
    return r;
}

constexpr double factorial(unsigned m) {
    double r = 1.0;
    for (unsigned i = 2; i <= m; ++i) r *= static_cast<double>(i);
    return r;
}

// m-th root with fast paths for the common exponents.
inline double root_m(double x, unsigned m) {
    if (m == 1) return x;
    if (m == 2) return std::sqrt(x);
    return std::pow(x, 1.0 / static_cast<double>(m));
}

// ceil() that forgives pow() landing a hair above an exact integer, so that
// e.g. ceil(1e6^(2/3)) is 10^4 and not 10^4 + 1.
inline std::uint64_t ceil_index(double x) {
    if (!(x >= 0.0)) throw std::domain_error("ceil_index: negative argument");
    const double slack = 1e-9 * std::max(1.0, x);
    return static_cast<std::uint64_t>(std::ceil(x - slack));
}

}  // namespace streambandit
