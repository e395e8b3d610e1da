// The verification suite behind `streambandit verify` and the acceptance
// test binary: quantitative desk-scale bands for the strategy guarantees
// plus the analytic identity checks, each reported as one pass/fail line.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "streambandit/acceptance_quadrature.hpp"
#include "streambandit/estimation.hpp"
#include "streambandit/harness.hpp"

namespace streambandit {

struct CriterionResult {
    std::string id;
    std::string label;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    bool full = true;                // false: reduced-scale smoke profile
    std::vector<std::string> only;   // run just these ids when nonempty
    unsigned threads = 0;            // forwarded to the harness
};

namespace acceptance_detail {

inline std::string g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Accumulates named sub-checks; a criterion passes when all of them do.
struct Checks {
    bool pass = true;
    std::string detail;

    void expect(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "FAIL ") + what;
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

inline ExperimentConfig experiment(DistributionSpec dist, StrategyKind kind, std::uint64_t n,
                                   std::uint64_t k, std::uint64_t episodes, std::uint64_t seed,
                                   PayoutModel payout, unsigned threads) {
    ExperimentConfig cfg;
    cfg.dist = dist;
    cfg.strategy.kind = kind;
    cfg.n = n;
    cfg.k = k;
    cfg.episodes = episodes;
    cfg.master_seed = seed;
    cfg.payout = payout;
    cfg.threads = threads;
    return cfg;
}

}  // namespace acceptance_detail

inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, std::ostream& out) {
    using acceptance_detail::Checks;
    using acceptance_detail::experiment;
    using acceptance_detail::g6;

    const bool full = opt.full;
    const unsigned threads = opt.threads;

    struct Criterion {
        const char* id;
        const char* label;
        std::function<Checks()> run;
    };
    std::vector<Criterion> criteria;

    // A1: uniform-case strategy band between the 2/N optimum and the 6/N ceiling.
    criteria.push_back({"A1", "known-uniform loss band, Bernoulli N=100 K=1e4", [=] {
        Checks c;
        const auto cfg = experiment(DistributionSpec::uniform(), StrategyKind::kKnownUniform, 100,
                                    10000, full ? 10000 : 2000, 1001, PayoutModel::kBernoulli, threads);
        const auto s = run_experiment(cfg);
        c.expect(s.mean_loss_per_flip >= 0.015 - 3.0 * s.std_error &&
                     s.mean_loss_per_flip <= 0.07 + 3.0 * s.std_error,
                 "mean_lpf=" + g6(s.mean_loss_per_flip) + " in [0.015,0.07] (3SE=" +
                     g6(3.0 * s.std_error) + ")");
        return c;
    }});

    // A2: beta-threshold convergence in fixed-payout mode, plus the n*beta_n
    // regression constants. The recursion provably approaches 2 from below
    // (1/beta_n >= (n+1)/2 for any base in (0,1]); the recorded constants
    // below replace the positive-side band once guessed for this check.
    criteria.push_back({"A2", "beta numbers: fixed-payout sim + n*beta_n regression", [=] {
        Checks c;
        const auto cfg = experiment(DistributionSpec::uniform(), StrategyKind::kBetaThreshold, 100,
                                    full ? 1000000 : 100000, full ? 1000 : 300, 1002,
                                    PayoutModel::kFixedPayout, threads);
        const auto s = run_experiment(cfg);
        const double ref = beta_tail(100);
        c.expect(std::fabs(s.mean_loss_per_flip - ref) <= 0.15 * ref,
                 "sim mean_lpf=" + g6(s.mean_loss_per_flip) + " within 15% of beta_100=" + g6(ref));
        const double v4 = beta_asymptote_check(10000);
        const double v6 = beta_asymptote_check(1000000);
        c.expect(std::fabs(v4 - 1.9978065319831244) <= 1e-9 * v4,
                 "n*beta_n(1e4)=" + g6(v4) + " matches recorded constant");
        c.expect(std::fabs(v6 - 1.9999688334467534) <= 1e-9 * v6,
                 "n*beta_n(1e6)=" + g6(v6) + " matches recorded constant");
        c.expect(v4 < 2.0 && v6 < 2.0 && std::fabs(v6 - 2.0) < std::fabs(v4 - 2.0),
                 "convergence toward 2 (from below; see decisions ledger)");
        return c;
    }});

    // A3: eta generalization, analytic limit and fixed-payout simulation at m=2.
    criteria.push_back({"A3", "eta numbers at m=2: ODE limit + fixed-payout sim", [=] {
        Checks c;
        const double limit = std::sqrt(1.5);
        const double scaled = std::sqrt(100000.0) * eta_tail(100000, 2);
        c.expect(std::fabs(scaled - limit) <= 0.02 * limit,
                 "sqrt(n)*eta_n(1e5)=" + g6(scaled) + " within 2% of sqrt(1.5)=" + g6(limit));
        const auto cfg = experiment(DistributionSpec::power(2), StrategyKind::kBetaThreshold, 100,
                                    full ? 1000000 : 100000, full ? 1000 : 300, 1003,
                                    PayoutModel::kFixedPayout, threads);
        const auto s = run_experiment(cfg);
        const double ref = eta_tail(100, 2);
        c.expect(std::fabs(s.mean_loss_per_flip - ref) <= 0.15 * ref,
                 "sim mean_lpf=" + g6(s.mean_loss_per_flip) + " within 15% of eta_100=" + g6(ref));
        return c;
    }});

    // A4: zero-head power strategy band at m=2.
    criteria.push_back({"A4", "known-power loss band, Bernoulli m=2 N=400", [=] {
        Checks c;
        const std::uint64_t n = 400;
        const std::uint64_t k = 4 * ceil_index(std::pow(static_cast<double>(n), 1.5));
        const auto cfg = experiment(DistributionSpec::power(2), StrategyKind::kKnownPower, n, k,
                                    full ? 4000 : 800, 1004, PayoutModel::kBernoulli, threads);
        const auto s = run_experiment(cfg);
        const double upper = upper_bound_per_flip_known_power(n, 2, 1.0);
        const double lower = 0.5 * eta_asymptote(n, 2, 1.0);
        c.expect(s.mean_loss_per_flip <= upper,
                 "mean_lpf=" + g6(s.mean_loss_per_flip) + " <= 2^(1/2)e/20=" + g6(upper));
        c.expect(s.mean_loss_per_flip >= lower, "mean_lpf >= half eta asymptote " + g6(lower));
        return c;
    }});

    // A5: sqrt(K)/8 small-budget lower bound for every streaming strategy.
    // The oracle benchmark is exempt: the bound quantifies over strategies
    // without foreknowledge of the means.
    criteria.push_back({"A5", "small-K lower bound sqrt(K)/8 across strategies", [=] {
        Checks c;
        const double bound = lower_bound_total(100, 1);
        struct Row {
            const char* text;
            PayoutModel payout;
        };
        const Row rows[] = {
            {"always-first", PayoutModel::kBernoulli},
            {"known-uniform", PayoutModel::kBernoulli},
            {"known-power:m=1,c=1", PayoutModel::kBernoulli},
            {"beta-threshold", PayoutModel::kFixedPayout},
            {"adaptive", PayoutModel::kBernoulli},
        };
        std::uint64_t seed = 1005;
        for (const Row& row : rows) {
            auto cfg = experiment(DistributionSpec::uniform(), StrategyKind::kAlwaysFirst, 1000000,
                                  100, full ? 10000 : 2000, seed++, row.payout, threads);
            cfg.strategy = parse_strategy(row.text);
            const auto s = run_experiment(cfg);
            c.expect(s.mean_total_loss >= bound - 3.0 * s.std_error_total,
                     std::string(row.text) + " total=" + g6(s.mean_total_loss) + " >= " + g6(bound));
        }
        return c;
    }});

    // A6: pooled-minimum estimator accuracy on fixed-payout samples.
    criteria.push_back({"A6", "pooled-minimum estimator, m=1 C=2, N=1e5 samples", [=] {
        Checks c;
        const auto dist = DistributionSpec::scaled_power(1, 2.0);
        const int trials = full ? 100 : 30;
        int hits = 0;
        double worst = 0.0;
        for (int t = 0; t < trials; ++t) {
            std::vector<double> means(100000);
            SplitMix64 g(derive_seed(1006, static_cast<std::uint64_t>(t), kMeanStream));
            for (auto& x : means) x = sample_mean(dist, next_unit_open(g));
            const double est = pooled_min_estimate(means, means.size(), 1).c_inv_root;
            const double err = std::fabs(est - 0.5);
            worst = std::max(worst, err);
            if (err <= 0.05) ++hits;
        }
        const int need = (trials * 95 + 99) / 100;
        c.expect(hits >= need, "within 10% of 0.5 in " + std::to_string(hits) + "/" +
                                   std::to_string(trials) + " seeds (worst err " + g6(worst) + ")");
        return c;
    }});

    // A7: first-head proxy left tail against the uniform law.
    criteria.push_back({"A7", "first-head sampler left tail, uniform means", [=] {
        Checks c;
        const int samples = full ? 100000 : 20000;
        std::vector<double> proxies(samples);
        SplitMix64 payout_rng(derive_seed(1007, 0, kPayoutStream));
        const auto dist = DistributionSpec::uniform();
        for (int i = 0; i < samples; ++i) {
            BanditStream s(1, dist, derive_seed(1007, static_cast<std::uint64_t>(i), kMeanStream),
                           PayoutModel::kBernoulli);
            proxies[i] = scale_proxy(first_head_sample(s, payout_rng, 1000000), 1);
        }
        std::sort(proxies.begin(), proxies.end());
        for (double x : {0.05, 0.1, 0.2}) {
            const auto it = std::upper_bound(proxies.begin(), proxies.end(), x);
            const double ecdf = static_cast<double>(it - proxies.begin()) / samples;
            c.expect(std::fabs(ecdf - x) <= 0.02,
                     "|ecdf(" + g6(x) + ")-x| = " + g6(std::fabs(ecdf - x)) + " <= 0.02");
        }
        return c;
    }});

    // A8: observation closed forms against adaptive quadrature + identities.
    criteria.push_back({"A8", "observation closed forms vs numeric integration", [=] {
        Checks c;
        double worst_p = 0.0, worst_e = 0.0;
        for (unsigned m = 1; m <= 3; ++m)
            for (std::uint64_t a = 0; a <= 10; ++a)
                for (std::uint64_t b = 0; b <= 10; ++b) {
                    worst_p = std::max(worst_p, std::fabs(prob_observation(a, b, m) -
                                                          acceptance_detail::prob_observation_quad(a, b, m)));
                    worst_e = std::max(worst_e, std::fabs(posterior_mean(a, b, m) -
                                                          acceptance_detail::posterior_mean_quad(a, b, m)));
                }
        c.expect(worst_p <= 1e-8, "max |prob - quadrature| = " + g6(worst_p) + " <= 1e-8");
        c.expect(worst_e <= 1e-8, "max |posterior - quadrature| = " + g6(worst_e) + " <= 1e-8");

        double worst_tot = 0.0, worst_exp = 0.0;
        for (unsigned m = 1; m <= 3; ++m)
            for (std::uint64_t t = 0; t <= 20; ++t) {
                double total = 0.0, expect = 0.0;
                for (std::uint64_t a = 0; a <= t; ++a) {
                    const double pr = prob_observation(a, t - a, m);
                    total += pr;
                    expect += pr * posterior_mean(a, t - a, m);
                }
                worst_tot = std::max(worst_tot, std::fabs(total - 1.0));
                worst_exp = std::max(worst_exp, std::fabs(expect - m / (m + 1.0)));
            }
        c.expect(worst_tot <= 1e-10, "total probability holds to " + g6(worst_tot));
        c.expect(worst_exp <= 1e-10, "total expectation holds to " + g6(worst_exp));
        return c;
    }});

    // A9: expected-minimum closed form, asymptotic ratio, Monte Carlo oracle.
    criteria.push_back({"A9", "expected minimum: identity, ratio, Monte Carlo", [=] {
        Checks c;
        double worst = 0.0;
        for (std::uint64_t n = 1; n <= 10000; ++n)
            worst = std::max(worst, std::fabs(expected_min_exact(n, 1) - 1.0 / static_cast<double>(n + 1)));
        c.expect(worst <= 1e-12, "max |E_min(n,1) - 1/(n+1)| = " + g6(worst) + " <= 1e-12");
        for (unsigned m = 1; m <= 3; ++m) {
            const double ratio = expected_min_exact(100000, m) / expected_min_asymptotic(100000, m);
            c.expect(std::fabs(ratio - 1.0) <= 0.01, "exact/asymptotic(1e5, m=" + std::to_string(m) +
                                                         ") = " + g6(ratio));
        }
        const int reps = full ? 1000000 : 200000;
        SplitMix64 g(1009);
        double sum = 0.0;
        for (int i = 0; i < reps; ++i) sum += std::min(next_unit_open(g), next_unit_open(g));
        const double mc = sum / reps;
        const double tol = full ? 1e-3 : 2.5e-3;
        c.expect(std::fabs(mc - 1.0 / 3.0) <= tol,
                 "MC min of pairs = " + g6(mc) + " within " + g6(tol) + " of 1/3");
        return c;
    }});

    // A10: adaptive strategy vs the known-C strategy on paired seeds.
    criteria.push_back({"A10", "adaptive end-to-end vs known-C, paired seeds", [=] {
        Checks c;
        std::uint64_t seed = 1010;
        for (double cc : {0.5, 1.0, 2.0}) {
            auto known = experiment(DistributionSpec::scaled_power(1, cc), StrategyKind::kKnownPower,
                                    10000, 100000000, full ? 200 : 40, seed++,
                                    PayoutModel::kBernoulli, threads);
            auto adaptive = known;
            adaptive.strategy = StrategySpec{};
            adaptive.strategy.kind = StrategyKind::kAdaptive;
            const auto pc = paired_compare(adaptive, known);
            const double ratio = pc.summary_a.mean_loss_per_flip / pc.summary_b.mean_loss_per_flip;
            c.expect(ratio <= 10.0 && ratio >= 0.1,
                     "C=" + g6(cc) + " lpf ratio adaptive/known = " + g6(ratio) + " in [0.1,10]");
            c.expect(pc.mean_delta >= -3.0 * pc.std_error,
                     "C=" + g6(cc) + " paired delta = " + g6(pc.mean_delta) + " >= -3SE");
        }
        return c;
    }});

    // A11: bit-identical reruns and per-episode oracle dominance in
    // fixed-payout mode. Dominance is checked on the N=100 beta-threshold
    // config and a five-strategy matrix at N=1000; see the ledger for why
    // the N=1e6 run is excluded (oracle cost is Theta(N) per episode).
    criteria.push_back({"A11", "determinism + fixed-payout oracle dominance", [=] {
        Checks c;
        auto cfg = experiment(DistributionSpec::uniform(), StrategyKind::kKnownUniform, 100, 10000,
                              100, 1011, PayoutModel::kBernoulli, threads);
        const std::string row1 = summary_csv_row(cfg, run_experiment(cfg));
        const std::string row2 = summary_csv_row(cfg, run_experiment(cfg));
        c.expect(row1 == row2, "identical configs give bit-identical CSV");
        auto serial = cfg;
        serial.threads = 1;
        c.expect(summary_csv_row(serial, run_experiment(serial)) == row1,
                 "thread count does not change results");

        auto oracle = experiment(DistributionSpec::uniform(), StrategyKind::kOracle, 1000, 10000,
                                 full ? 500 : 150, 1012, PayoutModel::kFixedPayout, threads);
        for (const char* text :
             {"known-uniform", "known-power:m=1,c=1", "beta-threshold", "always-first", "adaptive"}) {
            auto other = oracle;
            other.strategy = parse_strategy(text);
            const auto pc = paired_compare(oracle, other);
            bool dominated = true;
            for (double d : pc.delta_lpf) dominated = dominated && d <= 1e-12;
            c.expect(dominated, std::string("oracle <= ") + text + " on every episode");
        }

        auto beta_cfg = experiment(DistributionSpec::uniform(), StrategyKind::kBetaThreshold, 100,
                                   full ? 1000000 : 100000, 200, 1002, PayoutModel::kFixedPayout, threads);
        auto oracle_cfg = beta_cfg;
        oracle_cfg.strategy = StrategySpec{};
        oracle_cfg.strategy.kind = StrategyKind::kOracle;
        const auto pc = paired_compare(oracle_cfg, beta_cfg);
        bool dominated = true;
        for (double d : pc.delta_lpf) dominated = dominated && d <= 1e-12;
        c.expect(dominated, "oracle <= beta-threshold on the A2 configuration");
        return c;
    }});

    std::vector<CriterionResult> results;
    for (const auto& crit : criteria) {
        if (!opt.only.empty() &&
            std::find(opt.only.begin(), opt.only.end(), crit.id) == opt.only.end())
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Checks c = crit.run();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        results.push_back({crit.id, crit.label, c.pass, c.detail, secs});
        out << '[' << (c.pass ? "PASS" : "FAIL") << "] " << crit.id << " " << crit.label
            << (full ? "" : " (smoke)") << " (" << g6(secs) << "s)\n";
        if (!c.detail.empty()) out << "       " << c.detail << "\n";
        out.flush();
    }
    return results;
}

}  // namespace streambandit
