// Analytic reference values the harness compares simulations against:
// the beta/eta threshold recursions and their asymptotes, the small-budget
// lower bound, per-flip upper bounds, and the head/tail observation
// probabilities with their posterior means.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "streambandit/numeric.hpp"

namespace streambandit {

// eta_1 = m/(m+1) (the prior mean), eta_i = eta_{i-1} - eta_{i-1}^{m+1}/(m+1).
// Indexed by bandits remaining when used as settle thresholds.
inline std::vector<double> eta_seq(std::uint64_t n, unsigned m) {
    if (n < 1) throw std::domain_error("eta_seq: n must be >= 1");
    if (m < 1) throw std::domain_error("eta_seq: m must be >= 1");
    std::vector<double> seq(n);
    const double inv = 1.0 / (static_cast<double>(m) + 1.0);
    double e = static_cast<double>(m) * inv;
    seq[0] = e;
    for (std::uint64_t i = 1; i < n; ++i) {
        e -= inv * ipow(e, m + 1);
        seq[i] = e;
    }
    return seq;
}

inline std::vector<double> beta_seq(std::uint64_t n) { return eta_seq(n, 1); }

// eta_n without materializing the sequence.
inline double eta_tail(std::uint64_t n, unsigned m) {
    if (n < 1) throw std::domain_error("eta_tail: n must be >= 1");
    if (m < 1) throw std::domain_error("eta_tail: m must be >= 1");
    const double inv = 1.0 / (static_cast<double>(m) + 1.0);
    double e = static_cast<double>(m) * inv;
    for (std::uint64_t i = 1; i < n; ++i) e -= inv * ipow(e, m + 1);
    return e;
}

inline double beta_tail(std::uint64_t n) { return eta_tail(n, 1); }

// Limit value c^(-1/m) * ((m+1)/(m n))^(1/m); 2/n for the uniform case.
inline double eta_asymptote(std::uint64_t n, unsigned m, double c = 1.0) {
    if (n < 1) throw std::domain_error("eta_asymptote: n must be >= 1");
    const double mm = static_cast<double>(m);
    return root_m(1.0 / c, m) * root_m((mm + 1.0) / (mm * static_cast<double>(n)), m);
}

// No strategy beats total loss (m/(4(m+1))) * k^(m/(m+1)); sqrt(k)/8 at m=1.
inline double lower_bound_total(std::uint64_t k, unsigned m) {
    if (k < 1) throw std::domain_error("lower_bound_total: k must be >= 1");
    const double mm = static_cast<double>(m);
    return mm / (4.0 * (mm + 1.0)) * std::pow(static_cast<double>(k), mm / (mm + 1.0));
}

// Per-flip ceilings of the two threshold strategies.
inline double upper_bound_per_flip_known_uniform(std::uint64_t n_eff) {
    if (n_eff < 1) throw std::domain_error("upper_bound_per_flip: n_eff must be >= 1");
    return 6.0 / static_cast<double>(n_eff);
}

inline double upper_bound_per_flip_known_power(std::uint64_t n_eff, unsigned m, double c = 1.0) {
    if (n_eff < 1) throw std::domain_error("upper_bound_per_flip: n_eff must be >= 1");
    const double im = 1.0 / static_cast<double>(m);
    return root_m(1.0 / c, m) * std::pow(2.0, im) * std::exp(1.0) *
           std::pow(static_cast<double>(n_eff), -im);
}

// P(a heads and b tails from a bandit with mean drawn from the x^m law):
// m * Gamma(a+b+1) * Gamma(a+m) / (Gamma(a+1) * Gamma(a+b+m+1)).
// Reduces to 1/(a+b+1) at m = 1. The binomial factor is already included,
// so summing over a at fixed a+b gives 1.
inline double prob_observation(std::uint64_t a, std::uint64_t b, unsigned m) {
    if (m < 1) throw std::domain_error("prob_observation: m must be >= 1");
    const double ad = static_cast<double>(a), bd = static_cast<double>(b), md = m;
    return std::exp(std::log(md) + std::lgamma(ad + bd + 1.0) + std::lgamma(ad + md) -
                    std::lgamma(ad + 1.0) - std::lgamma(ad + bd + md + 1.0));
}

// Posterior mean of the bandit's mean after a heads and b tails: (a+m)/(a+b+m+1).
inline double posterior_mean(std::uint64_t a, std::uint64_t b, unsigned m) {
    if (m < 1) throw std::domain_error("posterior_mean: m must be >= 1");
    const double ad = static_cast<double>(a), bd = static_cast<double>(b), md = m;
    return (ad + md) / (ad + bd + md + 1.0);
}

// n * beta_n; rises toward 2 from below as n grows (see tests for the
// recorded regression constants).
inline double beta_asymptote_check(std::uint64_t n) {
    if (n < 2) throw std::domain_error("beta_asymptote_check: n must be >= 2");
    return static_cast<double>(n) * beta_tail(n);
}

struct BoundReport {
    std::uint64_t n = 0;
    unsigned m = 1;
    double c = 1.0;
    std::optional<std::uint64_t> k;
    std::vector<double> beta_or_eta;  // indexed 1..n at [i-1], unscaled (c = 1 law)
    double tail = 0.0;                // c^(-1/m) * eta_n
    double asymptote = 0.0;
    std::optional<double> lower_total_small_k;     // present when k given
    std::optional<double> upper_per_flip_uniform;  // m == 1 only
    double upper_per_flip_power = 0.0;
};

inline BoundReport make_bound_report(std::uint64_t n, unsigned m, double c = 1.0,
                                     std::optional<std::uint64_t> k = std::nullopt) {
    BoundReport r;
    r.n = n;
    r.m = m;
    r.c = c;
    r.k = k;
    r.beta_or_eta = eta_seq(n, m);
    r.tail = root_m(1.0 / c, m) * r.beta_or_eta.back();
    r.asymptote = eta_asymptote(n, m, c);
    if (k) r.lower_total_small_k = root_m(1.0 / c, m) * lower_bound_total(*k, m);
    if (m == 1) r.upper_per_flip_uniform = upper_bound_per_flip_known_uniform(n) / c;
    r.upper_per_flip_power = upper_bound_per_flip_known_power(n, m, c);
    return r;
}

}  // namespace streambandit
