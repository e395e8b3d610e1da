// Command-line front door: simulate | bounds | sweep | verify.
// Exit codes: 0 success, 1 verification failure, 2 usage error.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "streambandit/acceptance.hpp"
#include "streambandit/bounds.hpp"
#include "streambandit/harness.hpp"

namespace {

using namespace streambandit;

std::string g10(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

struct SimulateFlags {
    std::string strategy = "known-uniform";
    std::string dist = "uniform";
    std::uint64_t n = 100;
    std::uint64_t k = 10000;
    std::uint64_t episodes = 1000;
    std::uint64_t seed = 0;
    std::string payout = "bernoulli";
    unsigned threads = 0;
    std::string out_path;
    std::string json_path;
    std::string trace_path;
};

void add_simulate_flags(CLI::App* cmd, SimulateFlags& f, bool with_trace) {
    cmd->add_option("--strategy", f.strategy, "strategy spec, e.g. known-power:m=2,c=1");
    cmd->add_option("--dist", f.dist, "distribution spec, e.g. power:m=2,c=1.5");
    cmd->add_option("--n", f.n, "number of bandits");
    cmd->add_option("--k", f.k, "pull budget per episode");
    cmd->add_option("--episodes", f.episodes, "Monte Carlo repetitions");
    cmd->add_option("--seed", f.seed, "master seed; all randomness derives from it");
    cmd->add_option("--payout", f.payout, "payout model: bernoulli|fixed");
    cmd->add_option("--threads", f.threads, "worker threads (0 = machine parallelism)");
    cmd->add_option("--out", f.out_path, "also write the CSV to this file");
    cmd->add_option("--json", f.json_path, "write a JSON summary document to this file");
    if (with_trace)
        cmd->add_option("--trace", f.trace_path,
                        "write one CSV row per decision (runs single-threaded; keep --episodes small)");
}

// Maps spec-string problems to exit 2 with the offending flag named.
ExperimentConfig build_config(const SimulateFlags& f) {
    ExperimentConfig cfg;
    try {
        cfg.dist = parse_distribution(f.dist);
    } catch (const std::exception& e) {
        throw CLI::ValidationError("--dist", e.what());
    }
    try {
        cfg.strategy = parse_strategy(f.strategy);
    } catch (const std::exception& e) {
        throw CLI::ValidationError("--strategy", e.what());
    }
    try {
        cfg.payout = parse_payout(f.payout);
    } catch (const std::exception& e) {
        throw CLI::ValidationError("--payout", e.what());
    }
    cfg.n = f.n;
    cfg.k = f.k;
    cfg.episodes = f.episodes;
    cfg.master_seed = f.seed;
    cfg.threads = f.threads;
    try {
        cfg.validate();
        // Surface strategy/payout incompatibilities as usage errors up front.
        StrategyFactory probe(cfg.strategy, cfg.n, cfg.k, cfg.dist, cfg.payout);
    } catch (const CLI::Error&) {
        throw;
    } catch (const std::exception& e) {
        throw CLI::ValidationError("--strategy", e.what());
    }
    return cfg;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path);
    if (!out) throw CLI::ValidationError("--out", "cannot open '" + path + "' for writing");
    out << contents;
}

int run_simulate_rows(const std::vector<ExperimentConfig>& configs, const SimulateFlags& f) {
    std::ostringstream csv;
    csv << summary_csv_header() << '\n';
    nlohmann::json jdocs = nlohmann::json::array();

    for (const auto& cfg : configs) {
        MonteCarloSummary s;
        if (!f.trace_path.empty()) {
            std::ofstream tf(f.trace_path);
            if (!tf) throw CLI::ValidationError("--trace", "cannot open '" + f.trace_path + "'");
            tf << "episode,bandit_index,flips,heads,action,loss\n";
            TraceSink sink = [&tf](const TraceRow& r) {
                tf << r.episode << ',' << r.bandit_index << ',' << r.flips << ',' << r.heads << ','
                   << r.action << ',' << g10(r.loss) << '\n';
            };
            s = run_experiment_traced(cfg, sink);
        } else {
            s = run_experiment(cfg);
        }
        csv << summary_csv_row(cfg, s) << '\n';
        jdocs.push_back(summary_json(cfg, s));
    }

    std::cout << csv.str();
    if (!f.out_path.empty()) write_file(f.out_path, csv.str());
    if (!f.json_path.empty())
        write_file(f.json_path, (jdocs.size() == 1 ? jdocs[0] : jdocs).dump(2) + "\n");
    return 0;
}

int run_bounds(std::uint64_t n, unsigned m, double c, std::optional<std::uint64_t> k,
               const std::string& fmt, const std::string& seq_path) {
    const auto r = make_bound_report(n, m, c, k);
    if (!seq_path.empty()) {
        std::ostringstream seq;
        seq << "i,beta_or_eta\n";
        for (std::size_t i = 0; i < r.beta_or_eta.size(); ++i)
            seq << (i + 1) << ',' << g10(r.beta_or_eta[i]) << '\n';
        write_file(seq_path, seq.str());
    }
    if (fmt == "csv") {
        std::cout << "n,m,c,k,eta_tail,n_x_eta_tail,asymptote,lower_total,upper_uniform,upper_power\n";
        std::cout << n << ',' << m << ',' << g10(c) << ',' << (k ? std::to_string(*k) : "") << ','
                  << g10(r.tail) << ',' << g10(static_cast<double>(n) * r.tail) << ','
                  << g10(r.asymptote) << ','
                  << (r.lower_total_small_k ? g10(*r.lower_total_small_k) : "") << ','
                  << (r.upper_per_flip_uniform ? g10(*r.upper_per_flip_uniform) : "") << ','
                  << g10(r.upper_per_flip_power) << '\n';
        return 0;
    }
    auto line = [](const char* name, const std::string& value) {
        std::printf("  %-22s %s\n", name, value.c_str());
    };
    line("n", std::to_string(n));
    line("m", std::to_string(m));
    line("c", g10(c));
    if (k) line("k", std::to_string(*k));
    line("beta/eta tail", g10(r.tail));
    line("n * tail", g10(static_cast<double>(n) * r.tail));
    line("asymptote", g10(r.asymptote));
    if (r.lower_total_small_k) line("lower_total (k)", g10(*r.lower_total_small_k));
    if (r.upper_per_flip_uniform) line("upper_per_flip (6/N)", g10(*r.upper_per_flip_uniform));
    line("upper_per_flip (power)", g10(r.upper_per_flip_power));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"streaming one-way bandit simulator and bound calculator"};
    app.require_subcommand(1);

    SimulateFlags sim;
    auto* simulate = app.add_subcommand("simulate", "run one Monte Carlo experiment, print a CSV summary");
    add_simulate_flags(simulate, sim, /*with_trace=*/true);

    std::uint64_t bn = 100;
    unsigned bm = 1;
    double bc = 1.0;
    std::uint64_t bk_raw = 0;
    std::string bformat = "text";
    std::string bseq;
    auto* bounds = app.add_subcommand("bounds", "print analytic reference values");
    bounds->add_option("--n", bn, "bandit count");
    bounds->add_option("--m", bm, "power exponent");
    bounds->add_option("--c", bc, "left-tail scale");
    bounds->add_option("--k", bk_raw, "budget for the small-K lower bound");
    bounds->add_option("--format", bformat, "text|csv");
    bounds->add_option("--dump-seq", bseq, "write the full beta/eta sequence as CSV to this file");

    SimulateFlags sweep_flags;
    std::string sweep_param;
    std::string sweep_values;
    auto* sweep = app.add_subcommand("sweep", "run simulate across a list of parameter values");
    add_simulate_flags(sweep, sweep_flags, /*with_trace=*/false);
    sweep->add_option("--param", sweep_param, "parameter to vary: n|k|m|c|episodes")->required();
    sweep->add_option("--values", sweep_values, "comma-separated values")->required();

    std::string vsuite = "full";
    std::uint64_t vthreads = 0;
    auto* verify = app.add_subcommand("verify", "run the acceptance criteria; exit 0 iff all pass");
    verify->add_option("--suite", vsuite, "fast|full (fast runs reduced smoke scales)");
    verify->add_option("--threads", vthreads, "worker threads");

    try {
        app.parse(argc, argv);

        if (simulate->parsed()) return run_simulate_rows({build_config(sim)}, sim);

        if (bounds->parsed()) {
            if (bm < 1) throw CLI::ValidationError("--m", "must be >= 1");
            if (bn < 1) throw CLI::ValidationError("--n", "must be >= 1");
            if (!(bc > 0.0)) throw CLI::ValidationError("--c", "must be > 0");
            if (bformat != "text" && bformat != "csv")
                throw CLI::ValidationError("--format", "expected text|csv");
            std::optional<std::uint64_t> bk;
            if (bk_raw > 0) bk = bk_raw;
            return run_bounds(bn, bm, bc, bk, bformat, bseq);
        }

        if (sweep->parsed()) {
            if (sweep_values.empty()) throw CLI::ValidationError("--values", "empty value list");
            std::vector<std::string> values;
            std::stringstream ss(sweep_values);
            std::string tok;
            while (std::getline(ss, tok, ',')) values.push_back(tok);
            if (values.empty()) throw CLI::ValidationError("--values", "empty value list");

            std::vector<ExperimentConfig> configs;
            for (const auto& v : values) {
                SimulateFlags f = sweep_flags;
                try {
                    if (sweep_param == "n")
                        f.n = detail::parse_uint(v, "sweep n");
                    else if (sweep_param == "k")
                        f.k = detail::parse_uint(v, "sweep k");
                    else if (sweep_param == "episodes")
                        f.episodes = detail::parse_uint(v, "sweep episodes");
                    else if (sweep_param == "m" || sweep_param == "c") {
                        auto d = parse_distribution(f.dist);
                        if (sweep_param == "m")
                            d.m = static_cast<unsigned>(detail::parse_uint(v, "sweep m"));
                        else
                            d.c = detail::parse_double(v, "sweep c");
                        d.normalize();
                        d.validate();
                        f.dist = format(d);
                    } else {
                        throw CLI::ValidationError("--param", "expected n|k|m|c|episodes");
                    }
                } catch (const CLI::Error&) {
                    throw;
                } catch (const std::exception& e) {
                    throw CLI::ValidationError("--values", e.what());
                }
                configs.push_back(build_config(f));
            }
            return run_simulate_rows(configs, sweep_flags);
        }

        if (verify->parsed()) {
            AcceptanceOptions opt;
            if (vsuite == "fast")
                opt.full = false;
            else if (vsuite == "full")
                opt.full = true;
            else
                throw CLI::ValidationError("--suite", "expected fast|full");
            opt.threads = static_cast<unsigned>(vthreads);
            const auto results = run_acceptance(opt, std::cout);
            for (const auto& r : results)
                if (!r.pass) return 1;
            return 0;
        }
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::Error& e) {
        app.exit(e);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
