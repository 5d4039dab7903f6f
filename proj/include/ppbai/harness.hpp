#pragma once
// Experiment harness: seeded, reproducible sweeps over environments and
// audit policies, aggregated into fixed-schema CSV/JSON reports.
//
// Experiments:
//   coverage       anytime-coverage of the proxy interval on Bernoulli
//                  streams, swept over delta, stream mean, and horizon
//   compare        cost/accuracy of audit policies across top-gap settings
//   failure_modes  no_judge / no_audit / fixed / adaptive baselines on the
//                  default instance with paired seeds
//   run            a single verbose trial
//
// Trial i always uses seed base_seed + i, so cells sharing a base seed are
// paired.  Workers only distribute independent trials; outputs are byte
// identical for any worker count.  Undefined metrics (e.g. cost columns of
// coverage rows) are emitted as JSON null / CSV "null".

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ppbai/engine.hpp"

namespace ppbai::harness {

struct ExperimentConfig {
    std::string experiment = "compare";  // coverage | compare | failure_modes | run
    int n_trials = 20;
    std::uint64_t base_seed = 42;
    std::vector<std::string> policies;  // empty -> experiment default
    std::string out_dir = ".";
    int workers = 1;
    std::string format = "csv";  // csv | json | both
    bool dump_trials = false;    // also write per-trial results as JSON lines

    // Engine / policy knobs.
    double delta = 0.05;
    double pi_min = 0.05;
    double rho = 0.1;
    double c_f = 1.0;
    double c_y = 20.0;
    std::int64_t t_max = 20000;
    int n_init = 5;
    int warmup = 10;
    bool init_audit_at_floor = false;
    bool binned_scores = false;
    std::vector<double> gaps{0.10, 0.15, 0.20};

    // Coverage sweep knobs.
    std::vector<double> deltas{0.01, 0.05, 0.1, 0.2};
    std::vector<double> mus{0.3, 0.5, 0.7};
    std::vector<int> sizes{50, 100, 200, 500};
    int horizon = 500;

    void validate() const;
    std::vector<std::string> effective_policies() const;
};

// Plain-text `key=value` config files; '#' starts a comment.  CLI flags are
// applied on top of file values by the caller.
ExperimentConfig parse_config_file(const std::string& path);
void apply_config_file(ExperimentConfig& cfg, const std::string& path);
void apply_key_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);

struct ReportRow {
    std::string experiment;
    std::string config_id;
    std::string policy;
    double delta = 0.0;
    std::optional<double> gap;  // absent for coverage rows
    std::uint64_t seed_base = 0;
    int n_trials = 0;
    std::optional<double> mean_cost;
    std::optional<double> sd_cost;
    std::optional<double> audit_rate;
    std::optional<double> accuracy;
    double coverage = 0.0;
    double ci_low = 0.0;   // bootstrap 95% interval for the row's headline
    double ci_high = 0.0;  // metric: mean cost, or coverage for coverage rows
};

struct TrialRow {
    std::string config_id;
    int trial_id = 0;
    std::uint64_t seed = 0;
    TrialResult result;
};

struct AggregateReport {
    std::vector<ReportRow> rows;
    std::vector<TrialRow> trials;  // filled only when dump_trials is set
};

EngineConfig engine_config(const ExperimentConfig& cfg);
AuditPolicyConfig policy_config(const ExperimentConfig& cfg, PolicyKind kind);

// Per-arm reference residual second moments for the oracle policy, by
// seeded Monte Carlo (1e6 draws per arm; arm k uses seed mc_seed + k).
std::vector<double> oracle_reference_g(const EnvironmentSpec& env, std::uint64_t mc_seed = 900042);

// n_trials independent trials, trial i seeded base_seed + i, distributed
// over `workers` threads; results are indexed by trial id regardless of
// scheduling.
std::vector<TrialResult> run_cell(const EnvironmentSpec& env, const EngineConfig& ecfg,
                                  const AuditPolicyConfig& pcfg, const std::vector<double>& oracle_g,
                                  int n_trials, std::uint64_t base_seed, int workers);

AggregateReport run_coverage(const ExperimentConfig& cfg);
AggregateReport run_compare(const ExperimentConfig& cfg);
AggregateReport run_failure_modes(const ExperimentConfig& cfg);

// One verbose trial: the first configured policy (default uniform) on
// gap_instance(gaps[0]), seeded base_seed; appends every pull to `log`.
TrialResult run_single(const ExperimentConfig& cfg, std::vector<SampleRecord>* log = nullptr);

AggregateReport run_experiment(const ExperimentConfig& cfg);

// Percentile bootstrap 95% interval for the mean (1000 resamples, seeded).
std::pair<double, double> bootstrap_mean_ci(const std::vector<double>& values, std::uint64_t seed,
                                            int resamples = 1000);

std::string to_csv(const AggregateReport& report);
std::string to_json(const AggregateReport& report);
std::string trials_to_jsonl(const AggregateReport& report);
std::string record_log_to_jsonl(const std::vector<SampleRecord>& log);

// Writes <out_dir>/<experiment>.{csv,json} per cfg.format plus
// <experiment>_trials.jsonl when dump_trials is set; returns written paths.
std::vector<std::string> emit(const AggregateReport& report, const ExperimentConfig& cfg);

}  // namespace ppbai::harness
