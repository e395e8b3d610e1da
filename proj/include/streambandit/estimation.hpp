// Unknown-distribution machinery: first-head proxy sampling, the pooled
// minimum estimator of C^(-1/m), finite-set m selection, and the two-phase
// adaptive strategy composed from them.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "streambandit/numeric.hpp"
#include "streambandit/strategies.hpp"
#include "streambandit/stream.hpp"

namespace streambandit {

struct EstimatorConfig {
    double sample_exponent = 0.9;              // bandits sampled = ceil(n^sample_exponent)
    double pool_exponent = 0.2;                // pool size L = ceil(n^pool_exponent)
    std::vector<unsigned> m_candidates = {1};  // singleton in the basic case
    double density_bound_b = 10.0;             // admissible density interval [1/B, B]

    void validate() const {
        if (!(0.0 < pool_exponent && pool_exponent < sample_exponent && sample_exponent < 1.0))
            throw std::invalid_argument("EstimatorConfig: need 0 < pool_exp < sample_exp < 1");
        if (m_candidates.empty()) throw std::invalid_argument("EstimatorConfig: m_candidates empty");
        for (unsigned m : m_candidates)
            if (m < 1) throw std::invalid_argument("EstimatorConfig: m candidates must be >= 1");
        if (!(density_bound_b > 1.0))
            throw std::invalid_argument("EstimatorConfig: density bound B must be > 1");
    }

    bool operator==(const EstimatorConfig&) const = default;
};

struct EstimateResult {
    double c_inv_root = 0.0;  // estimate of C^(-1/m)
    unsigned m_selected = 1;
    std::uint64_t samples_used = 0;
    std::uint64_t flips_used = 0;
};

struct InsufficientSamplesError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Proxy mean of the current bandit: flip until the first head (or flip_cap
// flips) and return the reciprocal of the flips spent, then advance the
// stream. A first-flip head gives 1; a capped run gives 1/flip_cap. The
// proxy's left tail matches the mean law asymptotically once scaled by
// (m!)^(1/m).
inline double first_head_sample(BanditStream& stream, SplitMix64& rng, std::uint64_t flip_cap) {
    if (flip_cap < 1) throw std::invalid_argument("first_head_sample: flip_cap must be >= 1");
    std::uint64_t flips = 0;
    while (flips < flip_cap) {
        const double loss = stream.pull(rng);
        ++flips;
        if (loss >= 1.0) break;
    }
    stream.advance();
    return 1.0 / static_cast<double>(flips);
}

inline double scale_proxy(double mu, unsigned m) {
    if (!(mu > 0.0)) throw std::domain_error("scale_proxy: mu must be > 0");
    return root_m(factorial(m), m) * mu;
}

// Partition samples into pools of L = ceil(n^pool_exponent), discarding any
// remainder; average the pool minima and rescale by the exact first-order-
// statistic factor Gamma(L+1+1/m) / (Gamma(L+1) * Gamma(1+1/m)), which is
// L^(1/m)/Gamma(1+1/m) * (1 + O(1/L)) and unbiased for pure power laws.
inline EstimateResult pooled_min_estimate(std::span<const double> samples,
                                          std::uint64_t n_for_scaling, unsigned m,
                                          double pool_exponent = 0.2) {
    if (m < 1) throw std::domain_error("pooled_min_estimate: m must be >= 1");
    const std::uint64_t pool_size =
        std::max<std::uint64_t>(1, ceil_index(std::pow(static_cast<double>(n_for_scaling), pool_exponent)));
    const std::uint64_t pools = samples.size() / pool_size;
    if (pools == 0)
        throw InsufficientSamplesError("pooled_min_estimate: fewer samples than one pool");

    double sum_min = 0.0;
    for (std::uint64_t p = 0; p < pools; ++p) {
        double mn = samples[p * pool_size];
        for (std::uint64_t j = 1; j < pool_size; ++j)
            mn = std::min(mn, samples[p * pool_size + j]);
        sum_min += mn;
    }
    const double ld = static_cast<double>(pool_size);
    const double im = 1.0 / static_cast<double>(m);
    const double scale = std::exp(std::lgamma(ld + 1.0 + im) - std::lgamma(ld + 1.0) - std::lgamma(1.0 + im));

    EstimateResult r;
    r.c_inv_root = (sum_min / static_cast<double>(pools)) * scale;
    r.m_selected = m;
    r.samples_used = pools * pool_size;
    r.flips_used = r.samples_used;  // one flip per sample minimum; callers with real counts overwrite
    return r;
}

struct ModelSelection {
    unsigned m = 1;
    bool in_range = false;  // false = no candidate admissible; m is the fallback (largest)
};

// Smallest candidate whose implied density C = c_inv_root^(-m) lies in
// [1/B, B]; falls back to the largest candidate when none qualifies.
inline ModelSelection select_m(const std::map<unsigned, double>& c_inv_root_by_m, double density_bound_b) {
    if (c_inv_root_by_m.empty()) throw std::invalid_argument("select_m: no candidates");
    if (!(density_bound_b > 1.0)) throw std::invalid_argument("select_m: B must be > 1");
    for (const auto& [m, c_inv_root] : c_inv_root_by_m) {
        const double implied_c = ipow(1.0 / c_inv_root, m);
        if (implied_c >= 1.0 / density_bound_b && implied_c <= density_bound_b) return {m, true};
    }
    return {c_inv_root_by_m.rbegin()->first, false};
}

// Two-phase strategy for unknown C. Phase 1 spends the first
// ceil(n^sample_exponent) bandits gathering proxy means (one revealing pull
// each in fixed-payout mode, first-head sampling capped at
// ceil(k / (4 n^sample_exponent)) flips in Bernoulli mode). Phase 2 runs the
// zero-head power strategy on the remaining bandits with thresholds scaled
// by the estimated C^(-1/m). If the budget dies in phase 1 the episode just
// ends with the phase-1 losses.
class AdaptiveStrategy final : public Strategy {
public:
    AdaptiveStrategy(std::uint64_t n, std::uint64_t k, EstimatorConfig config, PayoutModel payout)
        : config_(std::move(config)), payout_(payout), n_(n) {
        config_.validate();
        phase1_count_ = ceil_index(std::pow(static_cast<double>(n), config_.sample_exponent));
        if (phase1_count_ >= n)
            throw std::invalid_argument("AdaptiveStrategy: n too small, phase 1 would consume every bandit");
        flip_cap_ = std::max<std::uint64_t>(
            1, ceil_index(static_cast<double>(k) /
                          (4.0 * std::pow(static_cast<double>(n), config_.sample_exponent))));
        samples_.reserve(64);
    }

    std::uint64_t phase1_bandits() const { return phase1_count_; }
    std::uint64_t flip_cap() const { return flip_cap_; }

    // Populated once phase 2 starts; zeros beforehand.
    const EstimateResult& estimate() const { return estimate_; }
    bool selection_failed() const { return selection_failed_; }

    Action decide(const Observation& o) override {
        if (o.bandit_index <= phase1_count_) {
            if (payout_ == PayoutModel::kFixedPayout) {
                if (o.flips == 0) return Action::kPull;
                record_sample(revealed_);
                return Action::kAdvance;
            }
            if (o.heads >= 1 || o.flips >= flip_cap_) {
                record_sample(1.0 / static_cast<double>(o.flips));
                return Action::kAdvance;
            }
            return Action::kPull;
        }
        if (!phase2_) start_phase2(o);
        return phase2_->decide(shifted(o));
    }

    void observe(const Observation& post, double loss) override {
        if (post.bandit_index <= phase1_count_) {
            ++phase1_flips_;
            revealed_ = loss;
        }
    }

    bool settled(const Observation& o) const override {
        return phase2_ && o.bandit_index > phase1_count_ && phase2_->settled(shifted(o));
    }

private:
    void record_sample(double v) {
        if (samples_.size() < phase1_count_) samples_.push_back(v);
    }

    Observation shifted(Observation o) const {
        o.bandit_index -= phase1_count_;
        return o;
    }

    void start_phase2(const Observation& o) {
        unsigned m = config_.m_candidates.front();
        double c_inv_root = 1.0;
        if (!samples_.empty()) {
            std::map<unsigned, double> by_m;
            for (unsigned cand : config_.m_candidates) {
                std::vector<double> scaled = samples_;
                if (payout_ == PayoutModel::kBernoulli)
                    for (double& s : scaled) s = scale_proxy(s, cand);
                by_m[cand] = pooled_min_estimate(scaled, n_, cand, config_.pool_exponent).c_inv_root;
            }
            const ModelSelection sel = select_m(by_m, config_.density_bound_b);
            selection_failed_ = !sel.in_range;
            m = sel.m;
            c_inv_root = by_m[m];
        }
        estimate_.c_inv_root = c_inv_root;
        estimate_.m_selected = m;
        estimate_.samples_used = samples_.size();
        estimate_.flips_used = phase1_flips_;

        const std::uint64_t remaining_bandits = n_ - phase1_count_;
        const std::uint64_t n_eff =
            truncate_n(remaining_bandits, std::max<std::uint64_t>(o.remaining_budget, 1), m);
        phase2_ = std::make_unique<KnownPowerStrategy>(n_eff, m, c_inv_root);
    }

    EstimatorConfig config_;
    PayoutModel payout_;
    std::uint64_t n_;
    std::uint64_t phase1_count_ = 0;
    std::uint64_t flip_cap_ = 1;
    std::uint64_t phase1_flips_ = 0;
    double revealed_ = 1.0;
    std::vector<double> samples_;
    std::unique_ptr<KnownPowerStrategy> phase2_;
    EstimateResult estimate_;
    bool selection_failed_ = false;
};

}  // namespace streambandit
