// The episode engine: a one-way stream of bandits with a pull budget, and
// the decision contract strategies implement against it.
#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "streambandit/distributions.hpp"
#include "streambandit/rng.hpp"

namespace streambandit {

enum class PayoutModel { kBernoulli, kFixedPayout };
enum class Action { kPull, kAdvance };

// What a strategy sees before each decision. flips/heads refer to the
// current bandit only and reset when the cursor moves.
struct Observation {
    std::uint64_t flips = 0;
    std::uint64_t heads = 0;         // unit losses observed from this bandit
    std::uint64_t bandit_index = 1;  // 1-based
    std::uint64_t remaining_budget = 0;
};

// Ordered latent means behind a forward-only cursor. Means are either an
// explicit list or drawn lazily from (dist, seed) with counter-based access,
// so an episode touching few of 10^6 bandits never materializes the rest.
class BanditStream {
public:
    BanditStream(std::vector<double> means, PayoutModel model)
        : means_(std::move(means)), model_(model) {
        n_ = std::get<std::vector<double>>(means_).size();
        if (n_ == 0) throw std::invalid_argument("BanditStream: need at least one bandit");
        cache_current();
    }

    BanditStream(std::uint64_t n, const DistributionSpec& dist, std::uint64_t mean_seed,
                 PayoutModel model)
        : means_(Drawn{dist, mean_seed}), model_(model), n_(n) {
        if (n_ == 0) throw std::invalid_argument("BanditStream: need at least one bandit");
        cache_current();
    }

    std::uint64_t size() const { return n_; }
    std::uint64_t cursor() const { return cursor_; }
    PayoutModel payout_model() const { return model_; }
    double current_mean() const { return current_mean_; }

    // 1-based, O(1) regardless of i; benchmark/test access.
    double mean_at(std::uint64_t i) const {
        if (i < 1 || i > n_) throw std::out_of_range("BanditStream: bandit index out of range");
        if (const auto* v = std::get_if<std::vector<double>>(&means_)) return (*v)[i - 1];
        const auto& d = std::get<Drawn>(means_);
        return sample_mean(d.dist, unit_open(SplitMix64::at(d.seed, i - 1)));
    }

    // No-op once the cursor sits on the last bandit.
    void advance() {
        if (cursor_ < n_) {
            ++cursor_;
            cache_current();
        }
    }

    // Bernoulli: 1 with probability p (one rng draw). FixedPayout: exactly p,
    // no draw consumed.
    double pull(SplitMix64& payout_rng) const {
        if (model_ == PayoutModel::kFixedPayout) return current_mean_;
        return next_unit_halfopen(payout_rng) < current_mean_ ? 1.0 : 0.0;
    }

private:
    struct Drawn {
        DistributionSpec dist;
        std::uint64_t seed;
    };

    void cache_current() { current_mean_ = mean_at(cursor_); }

    std::variant<std::vector<double>, Drawn> means_;
    PayoutModel model_;
    std::uint64_t n_ = 0;
    std::uint64_t cursor_ = 1;
    double current_mean_ = 0.0;
};

struct EpisodeResult {
    double total_loss = 0.0;
    std::uint64_t flips_used = 0;
    double loss_per_flip = 0.0;
    std::uint64_t settled_index = 0;  // bandit where the final pull landed
    std::uint64_t bandits_visited = 0;
};

// One row per engine event. action is "pull", "advance" or "settle"; a
// settle row covers the whole batched tail of pulls on the final bandit
// (flips/heads are cumulative for that bandit, loss is the row's total).
struct TraceRow {
    std::uint64_t episode = 0;
    std::uint64_t bandit_index = 0;
    std::uint64_t flips = 0;
    std::uint64_t heads = 0;
    const char* action = "";
    double loss = 0.0;
};
using TraceSink = std::function<void(const TraceRow&)>;

// Decision contract. decide() is consulted before every pull; observe() is
// fed the realized loss after each pull (in fixed-payout mode that reveals
// the latent mean exactly; in Bernoulli mode strategies never see p).
// settled() returning true promises every future decision at the current
// bandit is kPull, letting the engine spend the remaining budget in one
// exact batch.
class Strategy {
public:
    virtual ~Strategy() = default;
    virtual void begin_episode(const BanditStream& /*stream*/, std::uint64_t /*budget*/) {}
    virtual Action decide(const Observation& obs) = 0;
    virtual void observe(const Observation& /*post_pull*/, double /*loss*/) {}
    virtual bool settled(const Observation& /*obs*/) const { return false; }
};

// Runs exactly `budget` pulls. An ADVANCE decision at the last bandit is
// coerced to PULL so the budget is always spent. Identical inputs produce
// bit-identical results.
inline EpisodeResult run_episode(BanditStream& stream, Strategy& strategy, std::uint64_t budget,
                                 std::uint64_t payout_seed, const TraceSink* trace = nullptr,
                                 std::uint64_t episode_id = 0) {
    if (budget < 1) throw std::invalid_argument("run_episode: budget must be >= 1");
    SplitMix64 payout_rng(payout_seed);
    strategy.begin_episode(stream, budget);

    double total_loss = 0.0;
    std::uint64_t remaining = budget;
    std::uint64_t flips = 0, heads = 0;
    std::uint64_t last_pull_index = stream.cursor();

    while (remaining > 0) {
        const Observation obs{flips, heads, stream.cursor(), remaining};
        Action action = strategy.decide(obs);

        if (action == Action::kAdvance && stream.cursor() < stream.size()) {
            if (trace) (*trace)({episode_id, obs.bandit_index, flips, heads, "advance", 0.0});
            stream.advance();
            flips = 0;
            heads = 0;
            continue;
        }
        // kPull, or kAdvance coerced at the last bandit.

        if (remaining > 1 && strategy.settled(obs)) {
            // Absorbing state: spend the whole tail on this bandit at once.
            const double p = stream.current_mean();
            std::uint64_t tail_heads;
            double tail_loss;
            if (stream.payout_model() == PayoutModel::kBernoulli) {
                tail_heads = sample_binomial(payout_rng, remaining, p);
                tail_loss = static_cast<double>(tail_heads);
            } else {
                tail_heads = (p >= 1.0) ? remaining : 0;
                tail_loss = static_cast<double>(remaining) * p;
            }
            flips += remaining;
            heads += tail_heads;
            total_loss += tail_loss;
            last_pull_index = stream.cursor();
            if (trace) (*trace)({episode_id, obs.bandit_index, flips, heads, "settle", tail_loss});
            remaining = 0;
            break;
        }

        const double loss = stream.pull(payout_rng);
        --remaining;
        ++flips;
        if (loss >= 1.0) ++heads;
        total_loss += loss;
        last_pull_index = stream.cursor();
        const Observation post{flips, heads, stream.cursor(), remaining};
        strategy.observe(post, loss);
        if (trace) (*trace)({episode_id, post.bandit_index, flips, heads, "pull", loss});
    }

    EpisodeResult r;
    r.total_loss = total_loss;
    r.flips_used = budget;
    r.loss_per_flip = total_loss / static_cast<double>(budget);
    r.settled_index = last_pull_index;
    r.bandits_visited = stream.cursor();
    return r;
}

}  // namespace streambandit
