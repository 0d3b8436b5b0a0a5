#include "gtlab/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gtlab/bounds.hpp"
#include "gtlab/combinatorics.hpp"
#include "gtlab/decoder.hpp"
#include "gtlab/format.hpp"
#include "gtlab/rng.hpp"

namespace gtlab {

namespace {

constexpr std::uint64_t kMaxStratifiedSets = 10'000;

std::vector<int> draw_defectives(int n, int k, CounterRng& rng) {
    // Floyd's sampling: uniform over k-subsets with exactly k index draws.
    std::vector<int> picked;
    picked.reserve(static_cast<std::size_t>(k));
    for (int j = n - k; j < n; ++j) {
        const int r = static_cast<int>(rng.below(static_cast<std::uint64_t>(j) + 1));
        if (std::find(picked.begin(), picked.end(), r) != picked.end()) {
            picked.push_back(j);
        } else {
            picked.push_back(r);
        }
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

int defectives_in_pool(std::span<const std::uint8_t> pool, std::span<const int> truth) {
    int count = 0;
    for (int item : truth) count += pool[static_cast<std::size_t>(item)];
    return count;
}

struct TrialOutcome {
    std::uint8_t error = 0;
    int tests_used = 0;
    std::uint64_t n_ties = 1;
    std::vector<int> truth;
    std::vector<int> estimate;
};

TrialOutcome run_trial(const ExperimentConfig& cfg, long long trial, std::uint64_t strata) {
    TrialOutcome out;

    if (cfg.stratified) {
        out.truth = unrank_combination(static_cast<std::uint64_t>(trial) % strata, cfg.n_items,
                                       cfg.k_defects);
    } else {
        CounterRng defect_rng =
            trial_stream(cfg.seed, static_cast<std::uint64_t>(trial), StreamRole::DefectDraw);
        out.truth = draw_defectives(cfg.n_items, cfg.k_defects, defect_rng);
    }

    const std::uint64_t design_index =
        cfg.stratified ? static_cast<std::uint64_t>(trial) / strata
                       : static_cast<std::uint64_t>(trial);
    CounterRng design_rng = trial_stream(cfg.seed, design_index, StreamRole::Design);
    CounterRng channel_rng =
        trial_stream(cfg.seed, static_cast<std::uint64_t>(trial), StreamRole::Channel);

    StrategySession session(cfg.strategy, cfg.n_items, cfg.k_defects, cfg.n_tests, design_rng);
    std::vector<PoolStep> history;
    while (auto pool = session.next_pool(history)) {
        const int k_in_pool = defectives_in_pool(*pool, out.truth);
        const int y = cfg.model.sample_outcome(k_in_pool, channel_rng);
        history.push_back({std::move(*pool), y});
    }
    out.tests_used = session.pools_emitted();

    if (cfg.strategy.kind == StrategyKind::BinarySplit) {
        out.estimate = session.split_estimate();
    } else {
        TestMatrix matrix(cfg.n_items, 0);
        std::vector<int> outcomes;
        outcomes.reserve(history.size());
        for (const PoolStep& step : history) {
            matrix.append_pool(step.pool);
            outcomes.push_back(step.outcome);
        }
        DecodeOptions decode_options;
        decode_options.threads = 1;  // trials are the parallel unit
        const DecodeResult decoded =
            ml_decode(cfg.model, matrix, cfg.k_defects, outcomes, decode_options);
        out.estimate = decoded.estimate;
        out.n_ties = decoded.n_ties;
    }

    out.error = out.estimate != out.truth ? 1 : 0;
    return out;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (k_defects < 1 || k_defects >= n_items) {
        throw std::invalid_argument("ExperimentConfig: need 1 <= K < N");
    }
    if (n_tests < 0) throw std::invalid_argument("ExperimentConfig: negative test budget");
    if (n_trials < 1) throw std::invalid_argument("ExperimentConfig: need at least one trial");
    strategy.validate();
    if (stratified) {
        const auto strata = comb_count(n_items, k_defects, kMaxStratifiedSets);
        if (!strata) {
            throw std::invalid_argument("ExperimentConfig: stratified mode needs C(N, K) <= 10^4");
        }
        if (static_cast<std::uint64_t>(n_trials) % *strata != 0) {
            throw std::invalid_argument(
                "ExperimentConfig: stratified trials must be a multiple of C(N, K)");
        }
    }
}

RunSummary run_experiment(const ExperimentConfig& config) {
    config.validate();

    RunSummary summary;
    summary.requested_strategy = config.strategy;
    summary.config = config;
    summary.fano_floor = std::numeric_limits<double>::quiet_NaN();
    summary.t_lower = std::numeric_limits<double>::quiet_NaN();
    summary.t_upper = std::numeric_limits<double>::quiet_NaN();

    GridSpec grid;
    grid.step = config.grid_step;

    const bool need_bounds = config.checks.bounds || config.strategy.p_is_opt;
    if (need_bounds) {
        BoundsOptions options;
        options.grid = grid;
        options.threads = config.threads;
        const BoundsReport report =
            compute_bounds(config.model, config.n_items, config.k_defects, options);
        if (config.strategy.p_is_opt) {
            summary.config.strategy.p = report.p_star_lower;
            summary.config.strategy.p_is_opt = false;
        }
        if (config.checks.bounds) {
            summary.t_lower = report.t_lower;
            summary.t_upper = report.t_upper;
        }
    }
    const ExperimentConfig& cfg = summary.config;

    if (cfg.strategy.kind != StrategyKind::BinarySplit) {
        if (!comb_count(cfg.n_items, cfg.k_defects, kMaxDecodeCandidates)) {
            throw CapacityError("run_experiment: C(N, K) exceeds the decode candidate cap of " +
                                std::to_string(kMaxDecodeCandidates));
        }
    }
    std::uint64_t strata = 0;
    if (cfg.stratified) strata = *comb_count(cfg.n_items, cfg.k_defects, kMaxStratifiedSets);

    const long long n_trials = cfg.n_trials;
    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(n_trials));

#ifdef _OPENMP
    {
        const int max_threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(std::max(1, max_threads))
        for (long long t = 0; t < n_trials; ++t) {
            outcomes[static_cast<std::size_t>(t)] = run_trial(cfg, t, strata);
        }
    }
#else
    for (long long t = 0; t < n_trials; ++t) {
        outcomes[static_cast<std::size_t>(t)] = run_trial(cfg, t, strata);
    }
#endif

    long long n_errors = 0;
    long long total_tests = 0;
    for (const TrialOutcome& out : outcomes) {
        n_errors += out.error;
        total_tests += out.tests_used;
    }
    summary.n_errors = n_errors;
    summary.error_rate = static_cast<double>(n_errors) / static_cast<double>(n_trials);
    summary.mean_tests_used = static_cast<double>(total_tests) / static_cast<double>(n_trials);

    const double sigma = std::sqrt(summary.error_rate * (1.0 - summary.error_rate) /
                                   static_cast<double>(n_trials));
    summary.ci_halfwidth = 1.96 * sigma + 0.5 / static_cast<double>(n_trials);

    if (cfg.checks.fano) {
        FanoOptions fano_options;
        fano_options.mode = FanoPMode::MaxOverGrid;
        fano_options.grid = grid;
        summary.fano_floor =
            fano_floor(cfg.model, cfg.n_items, cfg.k_defects, cfg.n_tests, fano_options).value;
        summary.floor_violated = summary.error_rate + 3.0 * sigma < summary.fano_floor;
    }

    if (cfg.keep_trials) {
        summary.per_trial.reserve(outcomes.size());
        for (long long t = 0; t < n_trials; ++t) {
            TrialOutcome& out = outcomes[static_cast<std::size_t>(t)];
            summary.per_trial.push_back({t, std::move(out.truth), std::move(out.estimate),
                                         out.error != 0, out.tests_used, out.n_ties});
        }
    }
    return summary;
}

SweepAxis parse_axis(const std::string& name) {
    if (name == "tests" || name == "t") return SweepAxis::Tests;
    if (name == "p") return SweepAxis::P;
    if (name == "q") return SweepAxis::Q;
    if (name == "u") return SweepAxis::U;
    if (name == "n") return SweepAxis::N;
    throw std::invalid_argument("sweep: unknown axis '" + name + "'");
}

std::string axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::Tests: return "tests";
        case SweepAxis::P: return "p";
        case SweepAxis::Q: return "q";
        case SweepAxis::U: return "u";
        case SweepAxis::N: return "n";
    }
    return {};
}

namespace {

int integral_value(double v, const char* what) {
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) {
        throw std::invalid_argument(std::string("sweep: ") + what +
                                    " values must be nonnegative integers");
    }
    return static_cast<int>(v);
}

ExperimentConfig apply_axis(const ExperimentConfig& base, SweepAxis axis, double value) {
    ExperimentConfig cfg = base;
    switch (axis) {
        case SweepAxis::Tests:
            cfg.n_tests = integral_value(value, "tests");
            break;
        case SweepAxis::P:
            if (cfg.strategy.kind == StrategyKind::BinarySplit) {
                throw std::invalid_argument("sweep: p axis needs a Bernoulli-family strategy");
            }
            cfg.strategy.p = value;
            cfg.strategy.p_is_opt = false;
            break;
        case SweepAxis::Q:
            switch (cfg.model.kind()) {
                case NoiseKind::Addition:
                    cfg.model = NoiseModel::addition(value);
                    break;
                case NoiseKind::AddDilute:
                    cfg.model = NoiseModel::add_dilute(value, cfg.model.u());
                    break;
                case NoiseKind::NoiseFree:
                    cfg.model = NoiseModel::addition(value);
                    break;
                case NoiseKind::Dilution:
                    cfg.model = NoiseModel::add_dilute(value, cfg.model.u());
                    break;
            }
            break;
        case SweepAxis::U:
            switch (cfg.model.kind()) {
                case NoiseKind::Dilution:
                    cfg.model = NoiseModel::dilution(value);
                    break;
                case NoiseKind::AddDilute:
                    cfg.model = NoiseModel::add_dilute(cfg.model.q(), value);
                    break;
                case NoiseKind::NoiseFree:
                    cfg.model = NoiseModel::dilution(value);
                    break;
                case NoiseKind::Addition:
                    cfg.model = NoiseModel::add_dilute(cfg.model.q(), value);
                    break;
            }
            break;
        case SweepAxis::N:
            cfg.n_items = integral_value(value, "n");
            break;
    }
    return cfg;
}

}  // namespace

std::vector<RunSummary> sweep(const ExperimentConfig& base, SweepAxis axis,
                              std::span<const double> values) {
    std::vector<RunSummary> summaries;
    summaries.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        ExperimentConfig cfg = apply_axis(base, axis, values[i]);
        cfg.seed = derive_sweep_seed(base.seed, static_cast<std::uint64_t>(i));
        summaries.push_back(run_experiment(cfg));
    }
    return summaries;
}

namespace {

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

}  // namespace

std::string csv_header() {
    return "n,k,model,strategy,t,trials,seed,error_rate,ci,mean_tests,fano_floor,floor_violated";
}

std::string csv_row(const RunSummary& summary) {
    const ExperimentConfig& cfg = summary.config;
    std::string row;
    row += std::to_string(cfg.n_items) + ",";
    row += std::to_string(cfg.k_defects) + ",";
    row += csv_quote(cfg.model.spec_string()) + ",";
    row += csv_quote(cfg.strategy.spec_string()) + ",";
    row += std::to_string(cfg.n_tests) + ",";
    row += std::to_string(cfg.n_trials) + ",";
    row += std::to_string(cfg.seed) + ",";
    row += fmt_g12(summary.error_rate) + ",";
    row += fmt_g12(summary.ci_halfwidth) + ",";
    row += fmt_g12(summary.mean_tests_used) + ",";
    row += fmt_g12(summary.fano_floor) + ",";
    row += summary.floor_violated ? "true" : "false";
    return row;
}

std::string sidecar_json(const RunSummary& summary) {
    const ExperimentConfig& cfg = summary.config;
    std::string out;
    out += "{\n";
    out += "  \"n\": " + std::to_string(cfg.n_items) + ",\n";
    out += "  \"k\": " + std::to_string(cfg.k_defects) + ",\n";
    out += "  \"model\": \"" + cfg.model.spec_string() + "\",\n";
    out += "  \"strategy\": \"" + cfg.strategy.spec_string() + "\",\n";
    out += "  \"requested_strategy\": \"" + summary.requested_strategy.spec_string() + "\",\n";
    out += "  \"t\": " + std::to_string(cfg.n_tests) + ",\n";
    out += "  \"trials\": " + std::to_string(cfg.n_trials) + ",\n";
    out += "  \"seed\": " + std::to_string(cfg.seed) + ",\n";
    out += "  \"stratified\": " + std::string(cfg.stratified ? "true" : "false") + ",\n";
    out += "  \"grid_step\": " + fmt_json_number(cfg.grid_step) + ",\n";
    out += "  \"checks\": {\"fano\": " + std::string(cfg.checks.fano ? "true" : "false") +
           ", \"bounds\": " + std::string(cfg.checks.bounds ? "true" : "false") + "},\n";
    out += "  \"results\": {\n";
    out += "    \"error_rate\": " + fmt_json_number(summary.error_rate) + ",\n";
    out += "    \"ci\": " + fmt_json_number(summary.ci_halfwidth) + ",\n";
    out += "    \"mean_tests\": " + fmt_json_number(summary.mean_tests_used) + ",\n";
    out += "    \"fano_floor\": " + fmt_json_number(summary.fano_floor) + ",\n";
    out += "    \"floor_violated\": " + std::string(summary.floor_violated ? "true" : "false") +
           ",\n";
    out += "    \"t_lower\": " + fmt_json_number(summary.t_lower) + ",\n";
    out += "    \"t_upper\": " + fmt_json_number(summary.t_upper) + "\n";
    out += "  }\n";
    out += "}\n";
    return out;
}

}  // namespace gtlab
