// The threshold strategies and reference baselines behind the decision
// contract in stream.hpp.
#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

#include "streambandit/bounds.hpp"
#include "streambandit/numeric.hpp"
#include "streambandit/stream.hpp"

namespace streambandit {

// Effective bandit count when the budget is small: min(n, ceil(k^(m/(m+1)))).
inline std::uint64_t truncate_n(std::uint64_t n, std::uint64_t k, unsigned m) {
    if (n < 1 || k < 1) throw std::domain_error("truncate_n: n and k must be >= 1");
    const double mm = static_cast<double>(m);
    const std::uint64_t cap = ceil_index(std::pow(static_cast<double>(k), mm / (mm + 1.0)));
    return std::min(n, std::max<std::uint64_t>(cap, 1));
}

// Flip budget f_i = scale * ((m!/2) * (n_eff - (i-1)))^(1/m), compared as a
// real against the integer flip count. Indices past n_eff use the i = n_eff
// threshold. scale is c^(-1/m) (or its estimate).
inline double known_power_threshold(std::uint64_t n_eff, std::uint64_t i, unsigned m, double scale) {
    const std::uint64_t j = std::min(i, n_eff);
    return scale * root_m(0.5 * factorial(m) * static_cast<double>(n_eff - (j - 1)), m);
}

// Keep pulling while at most one head has shown and t <= n_eff - i, or once
// t has passed n_eff - i (settled); otherwise advance on the second head.
class KnownUniformStrategy final : public Strategy {
public:
    explicit KnownUniformStrategy(std::uint64_t n_eff) : n_eff_(n_eff) {
        if (n_eff_ < 1) throw std::invalid_argument("KnownUniformStrategy: n_eff must be >= 1");
    }

    Action decide(const Observation& o) override {
        const std::uint64_t limit = flip_limit(o.bandit_index);
        if (o.flips > limit) return Action::kPull;
        return o.heads <= 1 ? Action::kPull : Action::kAdvance;
    }

    bool settled(const Observation& o) const override { return o.flips > flip_limit(o.bandit_index); }

private:
    std::uint64_t flip_limit(std::uint64_t i) const { return i >= n_eff_ ? 0 : n_eff_ - i; }
    std::uint64_t n_eff_;
};

// Zero-head variant with real-valued thresholds f_i; advance on the first
// head unless the flip count has already passed f_i.
class KnownPowerStrategy final : public Strategy {
public:
    KnownPowerStrategy(std::uint64_t n_eff, unsigned m, double threshold_scale)
        : n_eff_(n_eff), m_(m), scale_(threshold_scale) {
        if (n_eff_ < 1) throw std::invalid_argument("KnownPowerStrategy: n_eff must be >= 1");
        if (m_ < 1) throw std::invalid_argument("KnownPowerStrategy: m must be >= 1");
        if (!(scale_ > 0.0)) throw std::invalid_argument("KnownPowerStrategy: threshold scale must be > 0");
    }

    Action decide(const Observation& o) override {
        if (static_cast<double>(o.flips) > threshold(o.bandit_index)) return Action::kPull;
        return o.heads == 0 ? Action::kPull : Action::kAdvance;
    }

    bool settled(const Observation& o) const override {
        return static_cast<double>(o.flips) > threshold(o.bandit_index);
    }

    double threshold(std::uint64_t i) const { return known_power_threshold(n_eff_, i, m_, scale_); }

private:
    std::uint64_t n_eff_;
    unsigned m_;
    double scale_;
};

// Fixed-payout threshold strategy: the first pull reveals the mean; settle
// iff it beats the precomputed threshold for the number of bandits left.
// thresholds[r] is the settle bar with r bandits remaining (thresholds[0] = 1,
// forcing settlement on the last effective bandit).
class BetaThresholdStrategy final : public Strategy {
public:
    BetaThresholdStrategy(std::shared_ptr<const std::vector<double>> thresholds, std::uint64_t n_eff)
        : thresholds_(std::move(thresholds)), n_eff_(n_eff) {
        if (!thresholds_ || thresholds_->size() < n_eff_)
            throw std::invalid_argument("BetaThresholdStrategy: thresholds shorter than n_eff");
    }

    // Convenience: thresholds from the eta recursion for the (m, c) law.
    static std::shared_ptr<const std::vector<double>> make_thresholds(std::uint64_t n_eff, unsigned m,
                                                                      double c) {
        auto t = std::make_shared<std::vector<double>>();
        t->reserve(n_eff);
        t->push_back(1.0);
        if (n_eff > 1) {
            const double scale = root_m(1.0 / c, m);
            const auto eta = eta_seq(n_eff - 1, m);
            for (double e : eta) t->push_back(scale * e);
        }
        return t;
    }

    Action decide(const Observation& o) override {
        if (o.flips == 0) return Action::kPull;  // reveal
        return stay(o) ? Action::kPull : Action::kAdvance;
    }

    void observe(const Observation& post, double loss) override {
        if (post.flips == 1) revealed_ = loss;
    }

    bool settled(const Observation& o) const override { return o.flips >= 1 && stay(o); }

private:
    bool stay(const Observation& o) const {
        const std::uint64_t r = o.bandit_index >= n_eff_ ? 0 : n_eff_ - o.bandit_index;
        return revealed_ < (*thresholds_)[r];
    }

    std::shared_ptr<const std::vector<double>> thresholds_;
    std::uint64_t n_eff_;
    double revealed_ = 1.0;
};

// Benchmark with full knowledge of the latent means: advances straight to
// the argmin and spends the whole budget there. Scans every mean at episode
// start, so it costs O(n) even when the stream is lazy.
class OracleStrategy final : public Strategy {
public:
    void begin_episode(const BanditStream& stream, std::uint64_t /*budget*/) override {
        double best = std::numeric_limits<double>::infinity();
        target_ = 1;
        for (std::uint64_t i = 1; i <= stream.size(); ++i) {
            const double v = stream.mean_at(i);
            if (v < best) {
                best = v;
                target_ = i;
            }
        }
    }

    Action decide(const Observation& o) override {
        return o.bandit_index == target_ ? Action::kPull : Action::kAdvance;
    }

    bool settled(const Observation& o) const override { return o.bandit_index == target_; }

private:
    std::uint64_t target_ = 1;
};

class AlwaysFirstStrategy final : public Strategy {
public:
    Action decide(const Observation&) override { return Action::kPull; }
    bool settled(const Observation&) const override { return true; }
};

}  // namespace streambandit
