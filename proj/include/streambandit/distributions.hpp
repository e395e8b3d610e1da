// Mean-generating laws: the uniform / pure-power / scaled-power family with
// left-tail CDF c*x^m, plus closed forms for the expected minimum of n draws.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "streambandit/numeric.hpp"

namespace streambandit {

enum class DistKind { kUniform, kPower, kScaledPower };

// Law of the latent means. The scaled-power law is the pure power(m) law
// rescaled by c^(-1/m) and truncated to [0,1]; for c < 1 the residual mass
// sits as a point mass at 1, which the left-tail analysis never touches.
struct DistributionSpec {
    DistKind kind = DistKind::kUniform;
    unsigned m = 1;  // power exponent, >= 1
    double c = 1.0;  // left-tail scale, > 0

    static DistributionSpec uniform() { return {DistKind::kUniform, 1, 1.0}; }
    static DistributionSpec power(unsigned m) {
        DistributionSpec s{DistKind::kPower, m, 1.0};
        s.normalize();
        s.validate();
        return s;
    }
    static DistributionSpec scaled_power(unsigned m, double c) {
        DistributionSpec s{DistKind::kScaledPower, m, c};
        s.normalize();
        s.validate();
        return s;
    }

    void normalize() {
        if (c != 1.0)
            kind = DistKind::kScaledPower;
        else
            kind = (m == 1) ? DistKind::kUniform : DistKind::kPower;
    }

    void validate() const {
        if (m < 1) throw std::invalid_argument("distribution: m must be >= 1");
        if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("distribution: c must be a positive real");
    }

    bool operator==(const DistributionSpec&) const = default;
};

inline double cdf(const DistributionSpec& d, double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("cdf: x outside [0,1]");
    return std::min(d.c * ipow(x, d.m), 1.0);
}

// Inverse CDF; for the scaled law, (u/c)^(1/m) clamped to [0,1].
inline double quantile(const DistributionSpec& d, double u) {
    if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("quantile: u outside [0,1]");
    return std::min(root_m(u / d.c, d.m), 1.0);
}

inline double sample_mean(const DistributionSpec& d, double u) {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("sample_mean: u outside (0,1)");
    return quantile(d, u);
}

// E[min of n draws from the x^m law] = n*Gamma(1/m)*Gamma(n) / (m*Gamma(n+1/m+1)),
// evaluated in log-Gamma space so n ~ 1e6 stays finite.
inline double expected_min_exact(std::uint64_t n, unsigned m) {
    if (n < 1) throw std::domain_error("expected_min_exact: n must be >= 1");
    if (m < 1) throw std::domain_error("expected_min_exact: m must be >= 1");
    const double nn = static_cast<double>(n);
    const double im = 1.0 / static_cast<double>(m);
    return std::exp(std::log(nn) + std::lgamma(im) + std::lgamma(nn) -
                    std::log(static_cast<double>(m)) - std::lgamma(nn + im + 1.0));
}

// Large-n form Gamma(1/m) / (m * n^(1/m)); invalid at small n (returns 1.0
// at n = 1, m = 1 where the exact value is 1/2).
inline double expected_min_asymptotic(std::uint64_t n, unsigned m) {
    if (n < 1) throw std::domain_error("expected_min_asymptotic: n must be >= 1");
    if (m < 1) throw std::domain_error("expected_min_asymptotic: m must be >= 1");
    const double im = 1.0 / static_cast<double>(m);
    return std::exp(std::lgamma(im) - std::log(static_cast<double>(m)) -
                    im * std::log(static_cast<double>(n)));
}

// Oracle reference for a full spec: the x^m value rescaled by c^(-1/m).
inline double expected_min(const DistributionSpec& d, std::uint64_t n) {
    return root_m(1.0 / d.c, d.m) * expected_min_exact(n, d.m);
}

// --- plain-text form, e.g. "uniform", "power:m=2", "scaled-power:m=1,c=2" ---

struct SpecParseError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

// Splits "k1=v1,k2=v2" and invokes fn(key, value); throws on malformed pairs.
template <class Fn>
void parse_kv_list(std::string_view text, std::string_view context, Fn&& fn) {
    while (!text.empty()) {
        const auto comma = text.find(',');
        const std::string_view item = text.substr(0, comma);
        text = (comma == std::string_view::npos) ? std::string_view{} : text.substr(comma + 1);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos || eq == 0 || eq + 1 == item.size())
            throw SpecParseError(std::string(context) + ": expected key=value, got '" + std::string(item) + "'");
        fn(item.substr(0, eq), item.substr(eq + 1));
    }
}

inline double parse_double(std::string_view v, std::string_view context) {
    try {
        std::size_t used = 0;
        const double r = std::stod(std::string(v), &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return r;
    } catch (const std::exception&) {
        throw SpecParseError(std::string(context) + ": bad numeric value '" + std::string(v) + "'");
    }
}

inline std::uint64_t parse_uint(std::string_view v, std::string_view context) {
    try {
        std::size_t used = 0;
        const unsigned long long r = std::stoull(std::string(v), &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return r;
    } catch (const std::exception&) {
        throw SpecParseError(std::string(context) + ": bad integer value '" + std::string(v) + "'");
    }
}

}  // namespace detail

inline std::string format(const DistributionSpec& d) {
    switch (d.kind) {
        case DistKind::kUniform: return "uniform";
        case DistKind::kPower: return "power:m=" + std::to_string(d.m);
        case DistKind::kScaledPower:
            return "scaled-power:m=" + std::to_string(d.m) + ",c=" + detail::format_double(d.c);
    }
    return "uniform";
}

inline DistributionSpec parse_distribution(std::string_view text) {
    const auto colon = text.find(':');
    const std::string_view head = text.substr(0, colon);
    const std::string_view params = (colon == std::string_view::npos) ? std::string_view{} : text.substr(colon + 1);

    DistributionSpec d;
    if (head == "uniform") {
        if (!params.empty()) throw SpecParseError("distribution 'uniform' takes no parameters");
    } else if (head == "power" || head == "scaled-power") {
        detail::parse_kv_list(params, "distribution", [&](std::string_view k, std::string_view v) {
            if (k == "m")
                d.m = static_cast<unsigned>(detail::parse_uint(v, "distribution m"));
            else if (k == "c")
                d.c = detail::parse_double(v, "distribution c");
            else
                throw SpecParseError("distribution: unknown key '" + std::string(k) + "'");
        });
    } else {
        throw SpecParseError("unknown distribution kind '" + std::string(head) + "'");
    }
    d.normalize();
    d.validate();
    return d;
}

}  // namespace streambandit
