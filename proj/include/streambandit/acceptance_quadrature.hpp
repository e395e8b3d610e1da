// Adaptive Simpson oracle used by the verification suite to check the
// observation closed forms against direct numeric integration.
#pragma once

#include <cmath>
#include <cstdint>

namespace streambandit::acceptance_detail {

template <class F>
double simpson_split(const F& f, double a, double m, double b, double fa, double fm, double fb,
                     double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_split(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_split(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(const F& f, double a, double b, double tol = 1e-12) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_split(f, a, m, b, fa, fm, fb, whole, tol, 48);
}

inline double binom_coeff(std::uint64_t n, std::uint64_t k) {
    double r = 1.0;
    for (std::uint64_t i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

inline double prob_observation_quad(std::uint64_t a, std::uint64_t b, unsigned m) {
    const double coeff = binom_coeff(a + b, a);
    return integrate(
        [&](double p) {
            return m * std::pow(p, static_cast<double>(m - 1)) * coeff *
                   std::pow(p, static_cast<double>(a)) * std::pow(1.0 - p, static_cast<double>(b));
        },
        0.0, 1.0, 1e-13);
}

inline double posterior_mean_quad(std::uint64_t a, std::uint64_t b, unsigned m) {
    // The binomial coefficient cancels in the ratio; keeping it conditions
    // both integrals near O(1).
    const double coeff = binom_coeff(a + b, a);
    const auto joint = [&](double p) {
        return coeff * m * std::pow(p, static_cast<double>(m - 1)) *
               std::pow(p, static_cast<double>(a)) * std::pow(1.0 - p, static_cast<double>(b));
    };
    const double z = integrate(joint, 0.0, 1.0, 1e-13);
    const double first = integrate([&](double p) { return p * joint(p); }, 0.0, 1.0, 1e-13);
    return first / z;
}

}  // namespace streambandit::acceptance_detail
