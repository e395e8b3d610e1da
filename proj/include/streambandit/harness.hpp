// Seeded Monte Carlo experiment runner: independent episodes with means
// redrawn per episode, aggregation, sub-optimality, and bound verdicts.
#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "streambandit/bounds.hpp"
#include "streambandit/distributions.hpp"
#include "streambandit/strategy_spec.hpp"
#include "streambandit/stream.hpp"

namespace streambandit {

struct ExperimentConfig {
    DistributionSpec dist;
    StrategySpec strategy;
    std::uint64_t n = 100;
    std::uint64_t k = 10000;
    std::uint64_t episodes = 1000;
    std::uint64_t master_seed = 0;
    PayoutModel payout = PayoutModel::kBernoulli;
    unsigned threads = 0;  // 0 = hardware concurrency

    void validate() const {
        if (n < 1 || k < 1 || episodes < 1)
            throw std::invalid_argument("ExperimentConfig: n, k and episodes must be >= 1");
        dist.validate();
    }
};

inline const char* payout_name(PayoutModel p) {
    return p == PayoutModel::kBernoulli ? "bernoulli" : "fixed";
}

inline PayoutModel parse_payout(std::string_view s) {
    if (s == "bernoulli") return PayoutModel::kBernoulli;
    if (s == "fixed") return PayoutModel::kFixedPayout;
    throw SpecParseError("unknown payout model '" + std::string(s) + "' (expected bernoulli|fixed)");
}

enum class Verdict { kPass, kFail, kNA };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::kPass: return "pass";
        case Verdict::kFail: return "fail";
        case Verdict::kNA: return "na";
    }
    return "?";
}

struct BoundVerdict {
    std::string name;
    double reference = 0.0;  // meaningless when verdict == kNA
    Verdict verdict = Verdict::kNA;
};

struct MonteCarloSummary {
    double mean_total_loss = 0.0;
    double mean_loss_per_flip = 0.0;
    double std_error = 0.0;        // of loss_per_flip
    double std_error_total = 0.0;  // of total loss
    double suboptimality = 0.0;    // mean lpf minus the oracle's expected minimum
    std::vector<BoundVerdict> bound_verdicts;
    std::vector<double> episode_loss_per_flip;  // indexed by episode
};

inline EpisodeResult run_one_episode(const ExperimentConfig& cfg, const StrategyFactory& factory,
                                     std::uint64_t episode, const TraceSink* trace = nullptr) {
    BanditStream stream(cfg.n, cfg.dist, derive_seed(cfg.master_seed, episode, kMeanStream), cfg.payout);
    auto strategy = factory.make();
    return run_episode(stream, *strategy, cfg.k,
                       derive_seed(cfg.master_seed, episode, kPayoutStream), trace, episode);
}

namespace detail {

// Bound verdicts use mean +/- 3 SE bands and go NA outside the documented
// validity floors (upper bounds need the budget above the settle horizon;
// the small-budget lower bound needs enough candidate bandits and does not
// bind the all-knowing oracle).
inline std::vector<BoundVerdict> make_verdicts(const ExperimentConfig& cfg, const StrategyFactory& factory,
                                               double mean_lpf, double se_lpf, double mean_total,
                                               double se_total) {
    std::vector<BoundVerdict> out;
    const StrategyKind kind = factory.spec().kind;
    const std::uint64_t n_eff = factory.n_effective();
    const unsigned m = factory.bound_m();
    const double c = factory.bound_c();

    BoundVerdict upper{"upper_per_flip", 0.0, Verdict::kNA};
    if (kind == StrategyKind::kKnownUniform) {
        upper.reference = upper_bound_per_flip_known_uniform(n_eff) / cfg.dist.c;
        const bool valid = cfg.k >= n_eff * n_eff;
        upper.verdict = !valid                             ? Verdict::kNA
                        : (mean_lpf - 3.0 * se_lpf <= upper.reference) ? Verdict::kPass
                                                                       : Verdict::kFail;
    } else if (kind == StrategyKind::kKnownPower) {
        upper.reference = upper_bound_per_flip_known_power(n_eff, m, c);
        const double mm = static_cast<double>(m);
        const bool valid = static_cast<double>(cfg.k) >=
                           std::pow(static_cast<double>(n_eff), (mm + 1.0) / mm) * (1.0 - 1e-9);
        upper.verdict = !valid                             ? Verdict::kNA
                        : (mean_lpf - 3.0 * se_lpf <= upper.reference) ? Verdict::kPass
                                                                       : Verdict::kFail;
    }
    out.push_back(upper);

    BoundVerdict lower{"lower_total_small_k", 0.0, Verdict::kNA};
    if (kind != StrategyKind::kOracle) {
        const unsigned dm = cfg.dist.m;
        lower.reference = root_m(1.0 / cfg.dist.c, dm) * lower_bound_total(cfg.k, dm);
        const double dmm = static_cast<double>(dm);
        const bool valid = static_cast<double>(cfg.n) >=
                           0.5 * std::pow(static_cast<double>(cfg.k), dmm / (dmm + 1.0));
        lower.verdict = !valid                                ? Verdict::kNA
                        : (mean_total + 3.0 * se_total >= lower.reference) ? Verdict::kPass
                                                                           : Verdict::kFail;
    }
    out.push_back(lower);
    return out;
}

}  // namespace detail

namespace detail {

// Episode order is fixed, so aggregation never depends on thread count.
inline MonteCarloSummary summarize(const ExperimentConfig& cfg, const StrategyFactory& factory,
                                   const std::vector<EpisodeResult>& results) {
    MonteCarloSummary s;
    s.episode_loss_per_flip.resize(results.size());
    double sum_lpf = 0.0, sum_total = 0.0;
    for (std::size_t e = 0; e < results.size(); ++e) {
        s.episode_loss_per_flip[e] = results[e].loss_per_flip;
        sum_lpf += results[e].loss_per_flip;
        sum_total += results[e].total_loss;
    }
    const double r = static_cast<double>(results.size());
    s.mean_loss_per_flip = sum_lpf / r;
    s.mean_total_loss = sum_total / r;
    if (results.size() > 1) {
        double ss = 0.0;
        for (double v : s.episode_loss_per_flip) {
            const double d = v - s.mean_loss_per_flip;
            ss += d * d;
        }
        s.std_error = std::sqrt(ss / (r - 1.0) / r);
        s.std_error_total = s.std_error * static_cast<double>(cfg.k);
    }
    s.suboptimality = s.mean_loss_per_flip - expected_min(cfg.dist, cfg.n);
    s.bound_verdicts = make_verdicts(cfg, factory, s.mean_loss_per_flip, s.std_error,
                                     s.mean_total_loss, s.std_error_total);
    return s;
}

}  // namespace detail

// Runs cfg.episodes independent episodes; episode seeds derive from
// (master_seed, episode, purpose) so results are a pure function of the
// config regardless of thread count.
inline MonteCarloSummary run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const StrategyFactory factory(cfg.strategy, cfg.n, cfg.k, cfg.dist, cfg.payout);

    std::vector<EpisodeResult> results(cfg.episodes);
    unsigned threads = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, cfg.episodes));

    if (threads <= 1) {
        for (std::uint64_t e = 0; e < cfg.episodes; ++e) results[e] = run_one_episode(cfg, factory, e);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(threads);
        std::exception_ptr failure;
        std::atomic<bool> failed{false};
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                try {
                    for (std::uint64_t e = next.fetch_add(1); e < cfg.episodes; e = next.fetch_add(1))
                        results[e] = run_one_episode(cfg, factory, e);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (failed) std::rethrow_exception(failure);
    }

    return detail::summarize(cfg, factory, results);
}

// Serial variant that feeds every engine event to `sink`. Tracing never
// alters the computation, only observes it.
inline MonteCarloSummary run_experiment_traced(const ExperimentConfig& cfg, const TraceSink& sink) {
    cfg.validate();
    const StrategyFactory factory(cfg.strategy, cfg.n, cfg.k, cfg.dist, cfg.payout);
    std::vector<EpisodeResult> results(cfg.episodes);
    for (std::uint64_t e = 0; e < cfg.episodes; ++e) results[e] = run_one_episode(cfg, factory, e, &sink);
    return detail::summarize(cfg, factory, results);
}

struct PairedComparison {
    std::vector<double> delta_lpf;  // a minus b, per episode
    double mean_delta = 0.0;
    double std_error = 0.0;
    MonteCarloSummary summary_a;
    MonteCarloSummary summary_b;
};

// Both runs see identical latent mean sequences (common random means), so
// per-episode differences are directly comparable.
inline PairedComparison paired_compare(const ExperimentConfig& a, const ExperimentConfig& b) {
    if (a.n != b.n || !(a.dist == b.dist) || a.master_seed != b.master_seed ||
        a.episodes != b.episodes)
        throw std::invalid_argument("paired_compare: configs must share n, dist, episodes and master_seed");
    PairedComparison pc;
    pc.summary_a = run_experiment(a);
    pc.summary_b = run_experiment(b);
    pc.delta_lpf.resize(a.episodes);
    double sum = 0.0;
    for (std::uint64_t e = 0; e < a.episodes; ++e) {
        pc.delta_lpf[e] = pc.summary_a.episode_loss_per_flip[e] - pc.summary_b.episode_loss_per_flip[e];
        sum += pc.delta_lpf[e];
    }
    const double r = static_cast<double>(a.episodes);
    pc.mean_delta = sum / r;
    if (a.episodes > 1) {
        double ss = 0.0;
        for (double v : pc.delta_lpf) {
            const double d = v - pc.mean_delta;
            ss += d * d;
        }
        pc.std_error = std::sqrt(ss / (r - 1.0) / r);
    }
    return pc;
}

// --- CSV / JSON emission (RFC-4180 quoting, 10 significant digits) ---

namespace detail {

inline std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

}  // namespace detail

inline std::string summary_csv_header() {
    return "strategy,dist,n,k,episodes,seed,mean_loss_per_flip,std_err,suboptimality,"
           "payout,mean_total_loss,upper_ref,upper_verdict,lower_ref,lower_verdict";
}

inline std::string summary_csv_row(const ExperimentConfig& cfg, const MonteCarloSummary& s) {
    const BoundVerdict& up = s.bound_verdicts.at(0);
    const BoundVerdict& lo = s.bound_verdicts.at(1);
    std::string row;
    row += detail::csv_quote(format(cfg.strategy));
    row += ',' + detail::csv_quote(format(cfg.dist));
    row += ',' + std::to_string(cfg.n);
    row += ',' + std::to_string(cfg.k);
    row += ',' + std::to_string(cfg.episodes);
    row += ',' + std::to_string(cfg.master_seed);
    row += ',' + detail::format_double(s.mean_loss_per_flip);
    row += ',' + detail::format_double(s.std_error);
    row += ',' + detail::format_double(s.suboptimality);
    row += ',' + std::string(payout_name(cfg.payout));
    row += ',' + detail::format_double(s.mean_total_loss);
    row += ',' + (up.verdict == Verdict::kNA ? std::string("na") : detail::format_double(up.reference));
    row += ',' + std::string(verdict_name(up.verdict));
    row += ',' + (lo.verdict == Verdict::kNA ? std::string("na") : detail::format_double(lo.reference));
    row += ',' + std::string(verdict_name(lo.verdict));
    return row;
}

inline nlohmann::json summary_json(const ExperimentConfig& cfg, const MonteCarloSummary& s) {
    nlohmann::json j;
    j["strategy"] = format(cfg.strategy);
    j["dist"] = format(cfg.dist);
    j["n"] = cfg.n;
    j["k"] = cfg.k;
    j["episodes"] = cfg.episodes;
    j["seed"] = cfg.master_seed;
    j["payout"] = payout_name(cfg.payout);
    j["mean_loss_per_flip"] = s.mean_loss_per_flip;
    j["std_err"] = s.std_error;
    j["suboptimality"] = s.suboptimality;
    j["mean_total_loss"] = s.mean_total_loss;
    nlohmann::json verdicts = nlohmann::json::array();
    for (const auto& v : s.bound_verdicts) {
        nlohmann::json jv;
        jv["name"] = v.name;
        jv["verdict"] = verdict_name(v.verdict);
        if (v.verdict != Verdict::kNA) jv["reference"] = v.reference;
        verdicts.push_back(jv);
    }
    j["bound_verdicts"] = verdicts;
    return j;
}

}  // namespace streambandit
