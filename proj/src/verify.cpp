#include "gtlab/verify.hpp"

#include <algorithm>
#include <cmath>

#include "gtlab/bounds.hpp"
#include "gtlab/format.hpp"
#include "gtlab/rng.hpp"

namespace gtlab {

namespace {

constexpr double kMiTolerance = 1e-10;

std::vector<NoiseModel> mi_check_models() {
    return {
        NoiseModel::noise_free(),    NoiseModel::addition(0.05), NoiseModel::addition(0.2),
        NoiseModel::dilution(0.1),   NoiseModel::dilution(0.5),  NoiseModel::add_dilute(0.1, 0.3),
    };
}

CheckResult mi_identity_check(const NoiseModel& model, int k_defects, bool inject_fault) {
    std::vector<double> f(static_cast<std::size_t>(k_defects) + 1);
    for (int c = 0; c <= k_defects; ++c) f[static_cast<std::size_t>(c)] = model.positive_prob(c);
    if (inject_fault && k_defects >= 1) f[1] = 1.0 - f[1];

    double max_diff = 0.0;
    int cases = 0;
    for (int ell = 0; ell < k_defects; ++ell) {
        for (int pi = 1; pi <= 9; ++pi) {
            const double p = pi * 0.1;
            const double closed = mi_from_positive_prob(f, k_defects, ell, p);
            const double oracle = mutual_information_bruteforce({model, k_defects, ell, p});
            max_diff = std::max(max_diff, std::abs(closed - oracle));
            ++cases;
        }
    }

    CheckResult result;
    result.name = "mi-identity " + model.spec_string() + " K=" + std::to_string(k_defects);
    result.passed = max_diff <= kMiTolerance;
    result.detail = "max |closed - oracle| = " + fmt_g12(max_diff) + " over " +
                    std::to_string(cases) + " cases";
    return result;
}

CheckResult fano_check(const ExperimentConfig& config) {
    const RunSummary summary = run_experiment(config);
    CheckResult result;
    result.name = "fano-floor " + config.model.spec_string() + " " +
                  config.strategy.spec_string() + " T=" + std::to_string(config.n_tests);
    result.passed = !summary.floor_violated;
    result.detail = "eps=" + fmt_g12(summary.error_rate) + " floor=" +
                    fmt_g12(summary.fano_floor) + " trials=" + std::to_string(config.n_trials);
    return result;
}

}  // namespace

bool VerifyReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.passed; });
}

int VerifyReport::n_failed() const {
    return static_cast<int>(std::count_if(checks.begin(), checks.end(),
                                          [](const CheckResult& c) { return !c.passed; }));
}

std::vector<ExperimentConfig> fano_preset_configs(bool quick) {
    const std::vector<NoiseModel> models = {
        NoiseModel::noise_free(),
        NoiseModel::addition(0.1),
        NoiseModel::dilution(0.5),
        NoiseModel::add_dilute(0.1, 0.3),
    };
    const std::vector<Strategy> strategies = {
        Strategy::parse("bernoulli:p=opt"),
        Strategy::parse("binary-split"),
        Strategy::parse("staged:p=opt,s=5"),
    };
    const std::vector<int> budgets = quick ? std::vector<int>{5, 20}
                                           : std::vector<int>{5, 10, 15, 20};
    const long long trials = quick ? 200 : 2000;

    std::vector<ExperimentConfig> configs;
    std::uint64_t index = 0;
    for (const NoiseModel& model : models) {
        for (const Strategy& strategy : strategies) {
            for (int t : budgets) {
                ExperimentConfig cfg;
                cfg.n_items = 50;
                cfg.k_defects = 2;
                cfg.model = model;
                cfg.strategy = strategy;
                cfg.n_tests = t;
                cfg.n_trials = trials;
                cfg.seed = derive_sweep_seed(7, index++);
                cfg.checks.fano = true;
                cfg.checks.bounds = false;
                configs.push_back(cfg);
            }
        }
    }
    return configs;
}

VerifyReport run_verification(const VerifyOptions& options) {
    VerifyReport report;

    const int k_max = options.quick ? 3 : 6;
    for (const NoiseModel& model : mi_check_models()) {
        for (int k = 1; k <= k_max; ++k) {
            const bool fault = options.inject_fault && model.kind() == NoiseKind::NoiseFree;
            report.checks.push_back(mi_identity_check(model, k, fault));
        }
    }

    for (ExperimentConfig cfg : fano_preset_configs(options.quick)) {
        cfg.threads = options.threads;
        report.checks.push_back(fano_check(cfg));
    }

    return report;
}

}  // namespace gtlab
