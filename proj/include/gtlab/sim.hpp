#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gtlab/design.hpp"
#include "gtlab/noise_model.hpp"

namespace gtlab {

struct ExperimentChecks {
    bool fano = true;    // compute the strategy-agnostic error floor and the violation flag
    bool bounds = false;  // compute t_lower / t_upper for the sidecar
};

struct ExperimentConfig {
    int n_items = 0;
    int k_defects = 0;
    NoiseModel model;
    Strategy strategy;
    int n_tests = 0;  // budget; adaptive strategies may stop early
    long long n_trials = 1;
    std::uint64_t seed = 0;
    // Stratified mode enumerates defective sets in rank order instead of
    // drawing them, so n_trials must be a multiple of C(N, K) <= 10^4. Each
    // full pass over the ranks shares one design stream, which makes the
    // error rate an exact average for that design.
    bool stratified = false;
    bool keep_trials = false;
    ExperimentChecks checks;
    double grid_step = 0.01;  // grid for p=opt resolution and the checks
    int threads = 0;          // 0 = library default

    void validate() const;
};

struct TrialRecord {
    long long trial = 0;
    std::vector<int> truth;
    std::vector<int> estimate;
    bool error = false;
    int tests_used = 0;
    std::uint64_t n_ties = 1;
};

struct RunSummary {
    ExperimentConfig config;      // as executed; strategy.p holds the resolved value
    Strategy requested_strategy;  // as given (may still say p=opt)
    long long n_errors = 0;
    double error_rate = 0.0;
    double ci_halfwidth = 0.0;  // 95% normal approximation with continuity guard
    double mean_tests_used = 0.0;
    double fano_floor = 0.0;  // NaN when checks.fano is off
    bool floor_violated = false;
    double t_lower = 0.0;  // NaN when checks.bounds is off
    double t_upper = 0.0;
    std::vector<TrialRecord> per_trial;  // filled when keep_trials
};

// Runs n_trials seeded Monte Carlo trials: draw the defective set, execute
// the strategy (adaptive pools see true outcomes as they arrive), decode,
// count an error whenever the estimate differs from the truth. The summary
// is bit-identical for a given config regardless of thread count.
RunSummary run_experiment(const ExperimentConfig& config);

enum class SweepAxis { Tests, P, Q, U, N };

SweepAxis parse_axis(const std::string& name);
std::string axis_name(SweepAxis axis);

// One run_experiment per value, in input order, with the seed for step i
// derived from (base seed, i). Tests / N values must be integral.
std::vector<RunSummary> sweep(const ExperimentConfig& base, SweepAxis axis,
                              std::span<const double> values);

std::string csv_header();
std::string csv_row(const RunSummary& summary);

// Config echo plus headline results, written next to CSV output as
// <out>.json for provenance.
std::string sidecar_json(const RunSummary& summary);

}  // namespace gtlab
