#include "ppbai/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "ppbai/boundary.hpp"

namespace ppbai::harness {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> items;
    std::stringstream stream(s);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

double parse_double(const std::string& key, const std::string& s) {
    std::size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument(key + ": not a number: '" + s + "'");
    }
    if (pos != s.size()) throw std::invalid_argument(key + ": not a number: '" + s + "'");
    return value;
}

long long parse_int(const std::string& key, const std::string& s) {
    std::size_t pos = 0;
    long long value = 0;
    try {
        value = std::stoll(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument(key + ": not an integer: '" + s + "'");
    }
    if (pos != s.size()) throw std::invalid_argument(key + ": not an integer: '" + s + "'");
    return value;
}

bool parse_bool(const std::string& key, const std::string& s) {
    std::string v = s;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw std::invalid_argument(key + ": not a boolean: '" + s + "'");
}

std::vector<double> parse_double_list(const std::string& key, const std::string& s) {
    std::vector<double> values;
    for (const auto& item : split_list(s)) values.push_back(parse_double(key, item));
    if (values.empty()) throw std::invalid_argument(key + ": empty list");
    return values;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& s) {
    std::vector<int> values;
    for (const auto& item : split_list(s))
        values.push_back(static_cast<int>(parse_int(key, item)));
    if (values.empty()) throw std::invalid_argument(key + ": empty list");
    return values;
}

std::string normalize_experiment(std::string name) {
    std::replace(name.begin(), name.end(), '-', '_');
    return name;
}

// Shortest round-trip decimal form, shared by config ids, CSV cells, and the
// JSON mirror so the same value prints identically everywhere.  Non-finite
// values become "null" in both formats.
std::string num(double v) { return ordered_json(v).dump(); }

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : "null"; }

const char* termination_name(Termination t) {
    return t == Termination::stopped ? "stopped" : "budget_exhausted";
}

double mean_of(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double sample_sd(const std::vector<double>& values) {
    const auto n = values.size();
    if (n < 2) return 0.0;
    const double m = mean_of(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

// Per-row bootstrap seed: deterministic in (base seed, row position) and
// independent of how many trials each cell ran.
std::uint64_t bootstrap_seed(const ExperimentConfig& cfg, std::size_t row_index) {
    return cfg.base_seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(row_index + 1));
}

ReportRow engine_row(const ExperimentConfig& cfg, const std::string& experiment,
                     const std::string& config_id, const std::string& policy,
                     std::optional<double> gap, const std::vector<TrialResult>& results,
                     std::uint64_t boot_seed) {
    ReportRow row;
    row.experiment = experiment;
    row.config_id = config_id;
    row.policy = policy;
    row.delta = cfg.delta;
    row.gap = gap;
    row.seed_base = cfg.base_seed;
    row.n_trials = static_cast<int>(results.size());

    std::vector<double> costs;
    costs.reserve(results.size());
    double audit = 0.0, acc = 0.0, cov = 0.0;
    for (const auto& r : results) {
        costs.push_back(r.total_cost);
        audit += r.audit_rate;
        acc += r.correct ? 1.0 : 0.0;
        cov += r.covered ? 1.0 : 0.0;
    }
    const double n = static_cast<double>(results.size());
    row.mean_cost = mean_of(costs);
    row.sd_cost = sample_sd(costs);
    row.audit_rate = audit / n;
    row.accuracy = acc / n;
    row.coverage = cov / n;
    const auto ci = bootstrap_mean_ci(costs, boot_seed);
    row.ci_low = ci.first;
    row.ci_high = ci.second;
    return row;
}

void push_trials(AggregateReport& report, const ExperimentConfig& cfg,
                 const std::string& config_id, const std::vector<TrialResult>& results) {
    if (!cfg.dump_trials) return;
    for (std::size_t i = 0; i < results.size(); ++i) {
        TrialRow t;
        t.config_id = config_id;
        t.trial_id = static_cast<int>(i);
        t.seed = cfg.base_seed + i;
        t.result = results[i];
        report.trials.push_back(std::move(t));
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    static const std::set<std::string> kExperiments{"coverage", "compare", "failure_modes", "run"};
    if (kExperiments.count(experiment) == 0)
        throw std::invalid_argument("ExperimentConfig: unknown experiment '" + experiment + "'");
    if (n_trials < 1) throw std::invalid_argument("ExperimentConfig: trials must be positive");
    if (workers < 1 || workers > 256)
        throw std::invalid_argument("ExperimentConfig: workers must lie in [1,256]");
    if (format != "csv" && format != "json" && format != "both")
        throw std::invalid_argument("ExperimentConfig: format must be csv, json, or both");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("ExperimentConfig: delta must lie in (0,1)");
    if (!(pi_min > 0.0 && pi_min <= 1.0))
        throw std::invalid_argument("ExperimentConfig: pi_min must lie in (0,1]");
    if (!(rho > 0.0 && rho <= 1.0))
        throw std::invalid_argument("ExperimentConfig: rho must lie in (0,1]");
    if (c_f < 0.0 || c_y < 0.0)
        throw std::invalid_argument("ExperimentConfig: costs must be nonnegative");
    if (t_max < 1) throw std::invalid_argument("ExperimentConfig: t_max must be positive");
    if (n_init < 1) throw std::invalid_argument("ExperimentConfig: n_init must be positive");
    if (warmup < 0) throw std::invalid_argument("ExperimentConfig: warmup must be nonnegative");
    for (const auto& name : policies) policy_from_name(name);  // throws on unknown names

    if (experiment == "compare" || experiment == "run") {
        if (gaps.empty()) throw std::invalid_argument("ExperimentConfig: gaps must be nonempty");
        for (double g : gaps)
            if (!(g > 0.0 && g <= 0.4))
                throw std::invalid_argument("ExperimentConfig: gaps must lie in (0, 0.4]");
    }
    if (experiment == "coverage") {
        if (deltas.empty()) throw std::invalid_argument("ExperimentConfig: deltas must be nonempty");
        for (double d : deltas)
            if (!(d > 0.0 && d < 1.0))
                throw std::invalid_argument("ExperimentConfig: deltas must lie in (0,1)");
        if (mus.empty()) throw std::invalid_argument("ExperimentConfig: mus must be nonempty");
        for (double m : mus)
            if (!(m >= 0.0 && m <= 1.0))
                throw std::invalid_argument("ExperimentConfig: mus must lie in [0,1]");
        if (horizon < 1) throw std::invalid_argument("ExperimentConfig: horizon must be positive");
        if (sizes.empty()) throw std::invalid_argument("ExperimentConfig: sizes must be nonempty");
        bool any_in_horizon = false;
        for (int s : sizes) {
            if (s < 1) throw std::invalid_argument("ExperimentConfig: sizes must be positive");
            any_in_horizon = any_in_horizon || s <= horizon;
        }
        if (!any_in_horizon)
            throw std::invalid_argument("ExperimentConfig: every size exceeds the horizon");
    }
}

std::vector<std::string> ExperimentConfig::effective_policies() const {
    if (!policies.empty()) return policies;
    if (experiment == "compare")
        return {"oracle", "neyman", "price_of_precision", "uncertainty_weighted", "uniform"};
    if (experiment == "run") return {"uniform"};
    return {};
}

void apply_key_value(ExperimentConfig& cfg, const std::string& raw_key, const std::string& value) {
    const std::string key = trim(raw_key);
    const std::string v = trim(value);
    if (key == "experiment") {
        cfg.experiment = normalize_experiment(v);
    } else if (key == "trials" || key == "n_trials") {
        cfg.n_trials = static_cast<int>(parse_int(key, v));
    } else if (key == "seed") {
        cfg.base_seed = static_cast<std::uint64_t>(parse_int(key, v));
    } else if (key == "policies" || key == "policy") {
        cfg.policies = split_list(v);
        if (cfg.policies.empty()) throw std::invalid_argument(key + ": empty list");
    } else if (key == "out" || key == "out_dir") {
        cfg.out_dir = v;
    } else if (key == "workers") {
        cfg.workers = static_cast<int>(parse_int(key, v));
    } else if (key == "format") {
        cfg.format = v;
    } else if (key == "dump_trials") {
        cfg.dump_trials = parse_bool(key, v);
    } else if (key == "delta") {
        cfg.delta = parse_double(key, v);
    } else if (key == "pi_min") {
        cfg.pi_min = parse_double(key, v);
    } else if (key == "rho") {
        cfg.rho = parse_double(key, v);
    } else if (key == "c_f") {
        cfg.c_f = parse_double(key, v);
    } else if (key == "c_y") {
        cfg.c_y = parse_double(key, v);
    } else if (key == "t_max") {
        cfg.t_max = parse_int(key, v);
    } else if (key == "n_init") {
        cfg.n_init = static_cast<int>(parse_int(key, v));
    } else if (key == "warmup") {
        cfg.warmup = static_cast<int>(parse_int(key, v));
    } else if (key == "init_audit_at_floor") {
        cfg.init_audit_at_floor = parse_bool(key, v);
    } else if (key == "binned_scores") {
        cfg.binned_scores = parse_bool(key, v);
    } else if (key == "gaps") {
        cfg.gaps = parse_double_list(key, v);
    } else if (key == "deltas") {
        cfg.deltas = parse_double_list(key, v);
    } else if (key == "mus") {
        cfg.mus = parse_double_list(key, v);
    } else if (key == "sizes") {
        cfg.sizes = parse_int_list(key, v);
    } else if (key == "horizon") {
        cfg.horizon = static_cast<int>(parse_int(key, v));
    } else {
        throw std::invalid_argument("unknown config key: '" + key + "'");
    }
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                        ": expected key=value, got '" + line + "'");
        apply_key_value(cfg, line.substr(0, eq), line.substr(eq + 1));
    }
}

ExperimentConfig parse_config_file(const std::string& path) {
    ExperimentConfig cfg;
    apply_config_file(cfg, path);
    return cfg;
}

EngineConfig engine_config(const ExperimentConfig& cfg) {
    EngineConfig ecfg;
    ecfg.delta = cfg.delta;
    ecfg.pi_min = cfg.pi_min;
    ecfg.n_init = cfg.n_init;
    ecfg.t_max = cfg.t_max;
    ecfg.cost = CostModel{cfg.c_f, cfg.c_y};
    ecfg.init_audit_at_floor = cfg.init_audit_at_floor;
    return ecfg;
}

AuditPolicyConfig policy_config(const ExperimentConfig& cfg, PolicyKind kind) {
    AuditPolicyConfig pcfg;
    pcfg.kind = kind;
    pcfg.rho = cfg.rho;
    pcfg.pi_min = cfg.pi_min;
    pcfg.warmup_audits = cfg.warmup;
    if (cfg.c_f > 0.0 && cfg.c_y > 0.0) pcfg.cost_ratio = cfg.c_f / cfg.c_y;
    pcfg.binned_scores = cfg.binned_scores;
    return pcfg;
}

std::vector<double> oracle_reference_g(const EnvironmentSpec& env, std::uint64_t mc_seed) {
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(env.num_arms()));
    for (int arm = 0; arm < env.num_arms(); ++arm)
        g.push_back(residual_second_moment(env, arm, 1'000'000, mc_seed + arm).value);
    return g;
}

std::vector<TrialResult> run_cell(const EnvironmentSpec& env, const EngineConfig& ecfg,
                                  const AuditPolicyConfig& pcfg, const std::vector<double>& oracle_g,
                                  int n_trials, std::uint64_t base_seed, int workers) {
    if (n_trials < 1) throw std::invalid_argument("run_cell: trials must be positive");
    if (workers < 1) throw std::invalid_argument("run_cell: workers must be positive");
    // Config errors must surface on the calling thread, before any spawn.
    env.validate();
    ecfg.validate(env.num_arms());
    pcfg.validate();

    std::vector<TrialResult> results(static_cast<std::size_t>(n_trials));
    std::atomic<int> next{0};
    auto work = [&] {
        for (int i = next.fetch_add(1); i < n_trials; i = next.fetch_add(1))
            results[static_cast<std::size_t>(i)] =
                run_trial(env, ecfg, pcfg, base_seed + static_cast<std::uint64_t>(i), oracle_g);
    };
    const int pool_size = std::min(workers, n_trials);
    if (pool_size <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(pool_size));
        for (int w = 0; w < pool_size; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return results;
}

AggregateReport run_coverage(const ExperimentConfig& cfg) {
    cfg.validate();
    const int horizon = cfg.horizon;
    const auto n_deltas = cfg.deltas.size();
    const auto n_mus = cfg.mus.size();

    // Half-widths of the two-sided anytime interval for a single stream of
    // [0,1] observations, per tracked delta, indexed by sample count.
    std::vector<std::vector<double>> widths(n_deltas);
    for (std::size_t d = 0; d < n_deltas; ++d) {
        widths[d].assign(static_cast<std::size_t>(horizon) + 1, 0.0);
        for (int n = 1; n <= horizon; ++n)
            widths[d][static_cast<std::size_t>(n)] = proxy_width(n, cfg.deltas[d]);
    }

    // first_violation[d][m][trial] = smallest n with |mean_n - mu| > width,
    // or horizon+1 when the stream stays covered throughout.
    const int none = horizon + 1;
    std::vector<std::vector<std::vector<int>>> first_violation(
        n_deltas, std::vector<std::vector<int>>(
                      n_mus, std::vector<int>(static_cast<std::size_t>(cfg.n_trials), none)));

    for (std::size_t m = 0; m < n_mus; ++m) {
        const double mu = cfg.mus[m];
        for (int trial = 0; trial < cfg.n_trials; ++trial) {
            std::mt19937_64 rng(cfg.base_seed +
                                static_cast<std::uint64_t>(m) *
                                    static_cast<std::uint64_t>(cfg.n_trials) +
                                static_cast<std::uint64_t>(trial));
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            double sum = 0.0;
            for (int n = 1; n <= horizon; ++n) {
                sum += unif(rng) < mu ? 1.0 : 0.0;
                const double dev = std::abs(sum / static_cast<double>(n) - mu);
                for (std::size_t d = 0; d < n_deltas; ++d) {
                    auto& first = first_violation[d][m][static_cast<std::size_t>(trial)];
                    if (first == none && dev > widths[d][static_cast<std::size_t>(n)]) first = n;
                }
            }
        }
    }

    AggregateReport report;
    for (std::size_t d = 0; d < n_deltas; ++d) {
        for (std::size_t m = 0; m < n_mus; ++m) {
            for (int size : cfg.sizes) {
                if (size > horizon) continue;
                std::vector<double> covered(static_cast<std::size_t>(cfg.n_trials));
                for (int trial = 0; trial < cfg.n_trials; ++trial)
                    covered[static_cast<std::size_t>(trial)] =
                        first_violation[d][m][static_cast<std::size_t>(trial)] > size ? 1.0 : 0.0;

                ReportRow row;
                row.experiment = "coverage";
                row.config_id = "coverage:delta=" + num(cfg.deltas[d]) + ":mu=" + num(cfg.mus[m]) +
                                ":n=" + std::to_string(size);
                row.policy = "none";
                row.delta = cfg.deltas[d];
                row.seed_base = cfg.base_seed;
                row.n_trials = cfg.n_trials;
                row.coverage = mean_of(covered);
                const auto ci =
                    bootstrap_mean_ci(covered, bootstrap_seed(cfg, report.rows.size()));
                row.ci_low = ci.first;
                row.ci_high = ci.second;
                report.rows.push_back(std::move(row));
            }
        }
    }
    return report;
}

AggregateReport run_compare(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto names = cfg.effective_policies();
    if (names.empty()) throw std::invalid_argument("run_compare: empty policy list");
    const auto base_ecfg = engine_config(cfg);

    AggregateReport report;
    for (double gap : cfg.gaps) {
        const auto env = gap_instance(gap);
        std::vector<double> oracle_g;
        for (const auto& name : names)
            if (policy_from_name(name) == PolicyKind::oracle && oracle_g.empty())
                oracle_g = oracle_reference_g(env);

        for (const auto& name : names) {
            const auto kind = policy_from_name(name);
            auto ecfg = base_ecfg;
            // Listing the audit-free diagnostic by name is the opt-in.
            ecfg.allow_positivity_violation = kind == PolicyKind::never;
            const auto pcfg = policy_config(cfg, kind);
            const auto results =
                run_cell(env, ecfg, pcfg, kind == PolicyKind::oracle ? oracle_g : std::vector<double>{},
                         cfg.n_trials, cfg.base_seed, cfg.workers);
            const std::string config_id = "compare:gap=" + num(gap) + ":" + name;
            report.rows.push_back(engine_row(cfg, "compare", config_id, name, gap, results,
                                             bootstrap_seed(cfg, report.rows.size())));
            push_trials(report, cfg, config_id, results);
        }
    }
    return report;
}

AggregateReport run_failure_modes(const ExperimentConfig& cfg) {
    cfg.validate();
    struct Strategy {
        const char* label;
        PolicyKind kind;
        bool allow_positivity_violation;
    };
    // no_judge audits everything (labels only, judge adds nothing beyond its
    // cost); no_audit trusts the judge outright; fixed audits a flat rho;
    // adaptive reallocates the same budget by estimated uncertainty.
    static constexpr Strategy kStrategies[] = {
        {"no_judge", PolicyKind::always, false},
        {"no_audit", PolicyKind::never, true},
        {"fixed", PolicyKind::uniform, false},
        {"adaptive", PolicyKind::uncertainty_weighted, false},
    };

    const auto env = default_instance();
    const auto base_ecfg = engine_config(cfg);

    AggregateReport report;
    for (const auto& strat : kStrategies) {
        auto ecfg = base_ecfg;
        ecfg.allow_positivity_violation = strat.allow_positivity_violation;
        const auto pcfg = policy_config(cfg, strat.kind);
        const auto results =
            run_cell(env, ecfg, pcfg, {}, cfg.n_trials, cfg.base_seed, cfg.workers);
        const std::string config_id = std::string("failure_modes:") + strat.label;
        report.rows.push_back(engine_row(cfg, "failure_modes", config_id, strat.label, 0.1,
                                         results, bootstrap_seed(cfg, report.rows.size())));
        push_trials(report, cfg, config_id, results);
    }
    return report;
}

TrialResult run_single(const ExperimentConfig& cfg, std::vector<SampleRecord>* log) {
    cfg.validate();
    const auto names = cfg.policies.empty() ? std::vector<std::string>{"uniform"} : cfg.policies;
    const auto kind = policy_from_name(names.front());
    const auto env = gap_instance(cfg.gaps.front());

    auto ecfg = engine_config(cfg);
    ecfg.allow_positivity_violation = kind == PolicyKind::never;
    const auto pcfg = policy_config(cfg, kind);
    std::vector<double> oracle_g;
    if (kind == PolicyKind::oracle) oracle_g = oracle_reference_g(env);
    return run_trial(env, ecfg, pcfg, cfg.base_seed, oracle_g, log);
}

AggregateReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.experiment == "coverage") return run_coverage(cfg);
    if (cfg.experiment == "compare") return run_compare(cfg);
    if (cfg.experiment == "failure_modes") return run_failure_modes(cfg);

    // experiment == "run": a single trial reported in the same schema.
    const auto names = cfg.policies.empty() ? std::vector<std::string>{"uniform"} : cfg.policies;
    const std::vector<TrialResult> results{run_single(cfg)};
    const std::string config_id = "run:gap=" + num(cfg.gaps.front()) + ":" + names.front();
    AggregateReport report;
    report.rows.push_back(engine_row(cfg, "run", config_id, names.front(), cfg.gaps.front(),
                                     results, bootstrap_seed(cfg, 0)));
    push_trials(report, cfg, config_id, results);
    return report;
}

std::pair<double, double> bootstrap_mean_ci(const std::vector<double>& values, std::uint64_t seed,
                                            int resamples) {
    if (values.empty()) throw std::invalid_argument("bootstrap_mean_ci: no values");
    if (resamples < 1) throw std::invalid_argument("bootstrap_mean_ci: resamples must be positive");
    if (values.size() == 1) return {values.front(), values.front()};

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
    std::vector<double> means(static_cast<std::size_t>(resamples));
    for (auto& m : means) {
        double sum = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) sum += values[pick(rng)];
        m = sum / static_cast<double>(values.size());
    }
    std::sort(means.begin(), means.end());
    // Outward-rounded percentile indices: 2.5% down, 97.5% up.
    const auto last = static_cast<double>(resamples - 1);
    const auto lo = static_cast<std::size_t>(std::floor(0.025 * last));
    const auto hi = static_cast<std::size_t>(std::ceil(0.975 * last));
    return {means[lo], means[hi]};
}

std::string to_csv(const AggregateReport& report) {
    std::string out =
        "experiment,config_id,policy,delta,gap,seed_base,n_trials,"
        "mean_cost,sd_cost,audit_rate,accuracy,coverage,ci_low,ci_high\n";
    for (const auto& r : report.rows) {
        out += r.experiment + ',' + r.config_id + ',' + r.policy + ',' + num(r.delta) + ',' +
               opt_num(r.gap) + ',' + std::to_string(r.seed_base) + ',' +
               std::to_string(r.n_trials) + ',' + opt_num(r.mean_cost) + ',' +
               opt_num(r.sd_cost) + ',' + opt_num(r.audit_rate) + ',' + opt_num(r.accuracy) +
               ',' + num(r.coverage) + ',' + num(r.ci_low) + ',' + num(r.ci_high) + '\n';
    }
    return out;
}

namespace {

ordered_json row_to_json(const ReportRow& r) {
    ordered_json j;
    j["experiment"] = r.experiment;
    j["config_id"] = r.config_id;
    j["policy"] = r.policy;
    j["delta"] = r.delta;
    j["gap"] = r.gap ? ordered_json(*r.gap) : ordered_json(nullptr);
    j["seed_base"] = r.seed_base;
    j["n_trials"] = r.n_trials;
    j["mean_cost"] = r.mean_cost ? ordered_json(*r.mean_cost) : ordered_json(nullptr);
    j["sd_cost"] = r.sd_cost ? ordered_json(*r.sd_cost) : ordered_json(nullptr);
    j["audit_rate"] = r.audit_rate ? ordered_json(*r.audit_rate) : ordered_json(nullptr);
    j["accuracy"] = r.accuracy ? ordered_json(*r.accuracy) : ordered_json(nullptr);
    j["coverage"] = r.coverage;
    j["ci_low"] = r.ci_low;
    j["ci_high"] = r.ci_high;
    return j;
}

}  // namespace

std::string to_json(const AggregateReport& report) {
    ordered_json j;
    j["rows"] = ordered_json::array();
    for (const auto& r : report.rows) j["rows"].push_back(row_to_json(r));
    return j.dump(2) + "\n";
}

std::string trials_to_jsonl(const AggregateReport& report) {
    std::string out;
    for (const auto& t : report.trials) {
        ordered_json j;
        j["config_id"] = t.config_id;
        j["trial_id"] = t.trial_id;
        j["seed"] = t.seed;
        j["selected_arm"] = t.result.selected_arm;
        j["stop_round"] = t.result.stop_round;
        j["n_pulls"] = t.result.n_pulls;
        j["n_audits"] = t.result.n_audits;
        j["total_cost"] = t.result.total_cost;
        j["audit_rate"] = t.result.audit_rate;
        j["correct"] = t.result.correct;
        j["covered"] = t.result.covered;
        j["termination"] = termination_name(t.result.termination);
        out += j.dump() + '\n';
    }
    return out;
}

std::string record_log_to_jsonl(const std::vector<SampleRecord>& log) {
    std::string out;
    for (const auto& rec : log) {
        ordered_json j;
        j["t"] = rec.t;
        j["arm"] = rec.arm;
        j["context"] = rec.context;
        j["score"] = rec.score;
        j["propensity"] = rec.propensity;
        j["audited"] = rec.audited;
        j["label"] = rec.label ? ordered_json(*rec.label) : ordered_json(nullptr);
        j["cost"] = rec.cost;
        out += j.dump() + '\n';
    }
    return out;
}

std::vector<std::string> emit(const AggregateReport& report, const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    std::vector<std::string> paths;
    auto write = [&](const std::string& name, const std::string& body) {
        const fs::path path = fs::path(cfg.out_dir) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << body;
        out.flush();
        if (!out) throw std::runtime_error("failed writing " + path.string());
        paths.push_back(path.string());
    };

    if (cfg.format == "csv" || cfg.format == "both") write(cfg.experiment + ".csv", to_csv(report));
    if (cfg.format == "json" || cfg.format == "both")
        write(cfg.experiment + ".json", to_json(report));
    if (cfg.dump_trials && !report.trials.empty())
        write(cfg.experiment + "_trials.jsonl", trials_to_jsonl(report));
    return paths;
}

}  // namespace ppbai::harness
