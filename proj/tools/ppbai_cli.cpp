// Command-line front end for the experiment harness.
//
//   ppbai coverage       anytime-coverage sweep of the score interval
//   ppbai compare        audit-policy comparison across top gaps
//   ppbai failure-modes  no_judge / no_audit / fixed / adaptive baselines
//   ppbai run            one verbose trial (optionally dumping its pull log)
//
// Precedence: built-in defaults, then --config file values, then flags.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "ppbai/harness.hpp"

namespace {

namespace hn = ppbai::harness;

struct CommonOpts {
    std::string config;
    int trials = 0;
    std::uint64_t seed = 0;
    double delta = 0.0, pi_min = 0.0, rho = 0.0, pull_cost = 0.0, audit_cost = 0.0;
    std::int64_t t_max = 0;
    int n_init = 0, warmup = 0, workers = 0, horizon = 0;
    std::vector<std::string> policies;
    std::vector<double> gaps, deltas, mus;
    std::vector<int> sizes;
    std::string out, format;
    bool dump_trials = false, init_floor = false, binned = false;

    // Options the user actually passed, applied over config-file values.
    std::vector<std::pair<CLI::Option*, std::function<void(hn::ExperimentConfig&)>>> appliers;

    void apply(hn::ExperimentConfig& cfg) const {
        for (const auto& [opt, fn] : appliers)
            if (opt->count() > 0) fn(cfg);
    }
};

void add_common_options(CLI::App* sub, CommonOpts& o) {
    sub->add_option("--config", o.config, "key=value config file applied before flags")
        ->check(CLI::ExistingFile);
    auto bind = [&o](CLI::Option* opt, std::function<void(hn::ExperimentConfig&)> fn) {
        o.appliers.emplace_back(opt, std::move(fn));
    };
    bind(sub->add_option("--trials", o.trials, "trials per cell"),
         [&o](auto& c) { c.n_trials = o.trials; });
    bind(sub->add_option("--seed", o.seed, "base seed; trial i uses seed+i"),
         [&o](auto& c) { c.base_seed = o.seed; });
    bind(sub->add_option("--delta", o.delta, "engine error budget"),
         [&o](auto& c) { c.delta = o.delta; });
    bind(sub->add_option("--pi-min", o.pi_min, "audit propensity floor"),
         [&o](auto& c) { c.pi_min = o.pi_min; });
    bind(sub->add_option("--rho", o.rho, "target average audit rate"),
         [&o](auto& c) { c.rho = o.rho; });
    bind(sub->add_option("--pull-cost", o.pull_cost, "cost per pull (judge score)"),
         [&o](auto& c) { c.c_f = o.pull_cost; });
    bind(sub->add_option("--audit-cost", o.audit_cost, "extra cost per audited pull"),
         [&o](auto& c) { c.c_y = o.audit_cost; });
    bind(sub->add_option("--t-max", o.t_max, "decision-round cap"),
         [&o](auto& c) { c.t_max = o.t_max; });
    bind(sub->add_option("--n-init", o.n_init, "warm-start pulls per arm"),
         [&o](auto& c) { c.n_init = o.n_init; });
    bind(sub->add_option("--warmup", o.warmup, "audits before plug-in variances are trusted"),
         [&o](auto& c) { c.warmup = o.warmup; });
    bind(sub->add_option("--policy", o.policies, "audit policies (repeat or comma-separate)")
             ->delimiter(','),
         [&o](auto& c) { c.policies = o.policies; });
    bind(sub->add_option("--gaps", o.gaps, "top gaps for generated instances")->delimiter(','),
         [&o](auto& c) { c.gaps = o.gaps; });
    bind(sub->add_option("--deltas", o.deltas, "deltas swept by the coverage experiment")
             ->delimiter(','),
         [&o](auto& c) { c.deltas = o.deltas; });
    bind(sub->add_option("--mus", o.mus, "stream means swept by the coverage experiment")
             ->delimiter(','),
         [&o](auto& c) { c.mus = o.mus; });
    bind(sub->add_option("--sizes", o.sizes, "sample sizes reported by the coverage experiment")
             ->delimiter(','),
         [&o](auto& c) { c.sizes = o.sizes; });
    bind(sub->add_option("--horizon", o.horizon, "coverage stream length"),
         [&o](auto& c) { c.horizon = o.horizon; });
    bind(sub->add_option("--out", o.out, "output directory"),
         [&o](auto& c) { c.out_dir = o.out; });
    bind(sub->add_option("--workers", o.workers, "threads for independent trials"),
         [&o](auto& c) { c.workers = o.workers; });
    bind(sub->add_option("--format", o.format, "report format: csv, json, or both"),
         [&o](auto& c) { c.format = o.format; });
    bind(sub->add_flag("--dump-trials", o.dump_trials, "also write per-trial JSON lines"),
         [&o](auto& c) { c.dump_trials = o.dump_trials; });
    bind(sub->add_flag("--init-audit-at-floor", o.init_floor,
                       "audit warm-start pulls at pi_min instead of max(rho, pi_min)"),
         [&o](auto& c) { c.init_audit_at_floor = o.init_floor; });
    bind(sub->add_flag("--binned-scores", o.binned,
                       "estimate residual variance per (arm, score-quartile)"),
         [&o](auto& c) { c.binned_scores = o.binned; });
}

int default_trials(const std::string& experiment) {
    if (experiment == "coverage") return 1000;
    if (experiment == "failure_modes") return 30;
    if (experiment == "run") return 1;
    return 20;  // compare
}

hn::ExperimentConfig build_config(const std::string& experiment, const CommonOpts& o) {
    hn::ExperimentConfig cfg;
    cfg.experiment = experiment;
    cfg.n_trials = default_trials(experiment);
    if (!o.config.empty()) hn::apply_config_file(cfg, o.config);
    cfg.experiment = experiment;  // the subcommand, not the file, picks the experiment
    o.apply(cfg);
    cfg.validate();
    return cfg;
}

void print_rows(const hn::AggregateReport& report) {
    for (const auto& row : report.rows) {
        std::cout << row.config_id;
        if (row.mean_cost) {
            std::cout << "  mean_cost=" << *row.mean_cost << "  accuracy=" << *row.accuracy
                      << "  audit_rate=" << *row.audit_rate;
        }
        std::cout << "  coverage=" << row.coverage << "  ci=[" << row.ci_low << ", "
                  << row.ci_high << "]\n";
    }
}

int run_experiment_command(const std::string& experiment, const CommonOpts& o) {
    const auto cfg = build_config(experiment, o);
    const auto report = hn::run_experiment(cfg);
    print_rows(report);
    for (const auto& path : hn::emit(report, cfg)) std::cout << "wrote " << path << "\n";
    return 0;
}

int run_single_command(const CommonOpts& o) {
    const auto cfg = build_config("run", o);
    std::vector<ppbai::SampleRecord> log;
    const auto result = hn::run_single(cfg, &log);

    std::cout << "policy        = " << (cfg.policies.empty() ? "uniform" : cfg.policies.front())
              << "\n"
              << "gap           = " << cfg.gaps.front() << "\n"
              << "seed          = " << cfg.base_seed << "\n"
              << "selected_arm  = " << result.selected_arm << "\n"
              << "correct       = " << (result.correct ? "yes" : "no") << "\n"
              << "stop_round    = " << result.stop_round << "\n"
              << "n_pulls       = " << result.n_pulls << "\n"
              << "n_audits      = " << result.n_audits << "\n"
              << "audit_rate    = " << result.audit_rate << "\n"
              << "total_cost    = " << result.total_cost << "\n"
              << "covered       = " << (result.covered ? "yes" : "no") << "\n"
              << "termination   = "
              << (result.termination == ppbai::Termination::stopped ? "stopped"
                                                                    : "budget_exhausted")
              << "\n";

    if (cfg.dump_trials) {
        namespace fs = std::filesystem;
        fs::create_directories(cfg.out_dir);
        const fs::path path = fs::path(cfg.out_dir) / "run_log.jsonl";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << hn::record_log_to_jsonl(log);
        std::cout << "wrote " << path.string() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Best-arm identification from judge scores with selective ground-truth audits"};
    app.require_subcommand(1);

    std::array<CommonOpts, 4> opts;
    auto* coverage = app.add_subcommand("coverage", "anytime coverage of the score interval");
    add_common_options(coverage, opts[0]);
    auto* compare = app.add_subcommand("compare", "cost/accuracy comparison of audit policies");
    add_common_options(compare, opts[1]);
    auto* failure = app.add_subcommand("failure-modes",
                                       "no_judge / no_audit / fixed / adaptive baselines");
    failure->alias("failure_modes");
    add_common_options(failure, opts[2]);
    auto* single = app.add_subcommand("run", "one verbose trial");
    add_common_options(single, opts[3]);

    CLI11_PARSE(app, argc, argv);

    try {
        if (coverage->parsed()) return run_experiment_command("coverage", opts[0]);
        if (compare->parsed()) return run_experiment_command("compare", opts[1]);
        if (failure->parsed()) return run_experiment_command("failure_modes", opts[2]);
        return run_single_command(opts[3]);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
