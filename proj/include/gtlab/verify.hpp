#pragma once

#include <string>
#include <vector>

#include "gtlab/sim.hpp"

namespace gtlab {

struct VerifyOptions {
    bool quick = false;        // smaller K range and fewer trials, finishes in seconds
    bool inject_fault = false;  // negative control: perturb one closed-form f-table entry
    int threads = 0;
};

struct CheckResult {
    std::string name;
    bool passed = true;
    std::string detail;
};

struct VerifyReport {
    std::vector<CheckResult> checks;

    bool all_passed() const;
    int n_failed() const;
};

// The shipped error-floor experiment grid: four noise models x
// {bernoulli:p=opt, binary-split, staged:p=opt,s=5} x a range of budgets,
// at N=50, K=2, with deterministic per-cell seeds.
std::vector<ExperimentConfig> fano_preset_configs(bool quick);

// Runs the closed-form-vs-oracle information identity suite and the
// error-floor preset suite.
VerifyReport run_verification(const VerifyOptions& options = {});

}  // namespace gtlab
