#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gtlab/bounds.hpp"
#include "gtlab/sim.hpp"
#include "gtlab/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitFloorViolated = 3;

struct BoundsArgs {
    int n = 0;
    int k = 0;
    std::string model;
    double grid_step = 0.01;
    std::string orientation = "as-printed";
    std::string out;
    int jobs = 0;
    std::string config;
};

struct SimArgs {
    int n = 0;
    int k = 0;
    std::string model;
    std::string strategy;
    int tests = -1;
    long long trials = 1000;
    std::uint64_t seed = 0;
    bool stratified = false;
    bool check_fano = false;
    bool check_bounds = false;
    double grid_step = 0.01;
    std::string decoder = "ml";
    std::string out;
    int jobs = 0;
    std::string config;
    std::string axis;    // sweep only
    std::string values;  // sweep only
};

struct VerifyArgs {
    bool quick = false;
    bool inject_fault = false;
    int jobs = 0;
};

gtlab::MiOrientation parse_orientation(const std::string& name) {
    if (name == "as-printed") return gtlab::MiOrientation::AsPrinted;
    if (name == "swapped") return gtlab::MiOrientation::Swapped;
    throw std::invalid_argument("unknown mi orientation '" + name + "'");
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::string trimmed(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

// Expands `--config <file>` into --key=value tokens appended behind the
// explicit arguments.  Keys already given on the command line are skipped,
// which is what makes explicit flags win over the file.
std::vector<std::string> apply_config_file(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;

    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    std::string line;
    while (std::getline(in, line)) {
        const std::string entry = trimmed(line);
        if (entry.empty() || entry[0] == '#') continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("bad config line '" + entry + "' (expected key=value)");
        const std::string flag = "--" + trimmed(entry.substr(0, eq));
        if (flag == "--" || flag == "--config")
            throw std::invalid_argument("bad config line '" + entry + "'");
        const std::string value = trimmed(entry.substr(eq + 1));
        bool given = false;
        for (const std::string& arg : args)
            given |= arg == flag || arg.rfind(flag + "=", 0) == 0;
        if (!given) args.push_back(value.empty() ? flag : flag + "=" + value);
    }
    return args;
}

std::vector<double> parse_value_list(const std::string& text) {
    std::vector<double> values;
    std::string rest = text;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string item = rest.substr(0, comma);
        rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
        std::size_t pos = 0;
        const double v = std::stod(item, &pos);
        if (pos != item.size()) throw std::invalid_argument("bad sweep value '" + item + "'");
        values.push_back(v);
    }
    if (values.empty()) throw std::invalid_argument("empty sweep value list");
    return values;
}

gtlab::ExperimentConfig build_config(const SimArgs& args) {
    gtlab::ExperimentConfig cfg;
    cfg.n_items = args.n;
    cfg.k_defects = args.k;
    cfg.model = gtlab::NoiseModel::parse(args.model);
    cfg.strategy = gtlab::Strategy::parse(args.strategy);
    cfg.n_trials = args.trials;
    cfg.seed = args.seed;
    cfg.stratified = args.stratified;
    cfg.checks.fano = args.check_fano;
    cfg.checks.bounds = args.check_bounds;
    cfg.grid_step = args.grid_step;
    cfg.threads = args.jobs;

    if (args.tests >= 0) {
        cfg.n_tests = args.tests;
    } else if (cfg.strategy.kind == gtlab::StrategyKind::BinarySplit) {
        int per_round = 0;
        while ((1 << per_round) < cfg.n_items) ++per_round;
        cfg.n_tests = cfg.k_defects * per_round;
    } else {
        throw std::invalid_argument("--tests is required for this strategy");
    }
    return cfg;
}

int cmd_bounds(const BoundsArgs& args) {
    gtlab::BoundsOptions options;
    options.grid.step = args.grid_step;
    options.orientation = parse_orientation(args.orientation);
    options.threads = args.jobs;
    const gtlab::BoundsReport report =
        gtlab::compute_bounds(gtlab::NoiseModel::parse(args.model), args.n, args.k, options);
    const std::string json = report.to_json();
    std::cout << json;
    if (!args.out.empty()) write_file(args.out, json);
    return kExitOk;
}

int cmd_simulate(const SimArgs& args) {
    const gtlab::RunSummary summary = gtlab::run_experiment(build_config(args));
    const std::string text = gtlab::csv_header() + "\n" + gtlab::csv_row(summary) + "\n";
    std::cout << text;
    if (!args.out.empty()) {
        write_file(args.out, text);
        write_file(args.out + ".json", gtlab::sidecar_json(summary));
    }
    if (args.check_fano && summary.floor_violated) {
        std::cerr << "error floor violated: eps=" << summary.error_rate
                  << " floor=" << summary.fano_floor << "\n";
        return kExitFloorViolated;
    }
    return kExitOk;
}

int cmd_sweep(SimArgs args) {
    const gtlab::SweepAxis axis = gtlab::parse_axis(args.axis);
    // The tests axis supplies its own budget per step, so none is needed up front.
    if (axis == gtlab::SweepAxis::Tests && args.tests < 0) args.tests = 0;
    const gtlab::ExperimentConfig base = build_config(args);
    const std::vector<double> values = parse_value_list(args.values);
    const std::vector<gtlab::RunSummary> summaries = gtlab::sweep(base, axis, values);

    std::string text = gtlab::csv_header() + "\n";
    for (const gtlab::RunSummary& summary : summaries) text += gtlab::csv_row(summary) + "\n";
    std::cout << text;

    if (!args.out.empty()) {
        write_file(args.out, text);
        std::string sidecars = "[\n";
        for (std::size_t i = 0; i < summaries.size(); ++i) {
            sidecars += gtlab::sidecar_json(summaries[i]);
            if (i + 1 < summaries.size()) {
                sidecars.insert(sidecars.size() - 1, ",");  // before the trailing newline
            }
        }
        sidecars += "]\n";
        write_file(args.out + ".json", sidecars);
    }

    bool violated = false;
    for (const gtlab::RunSummary& summary : summaries) violated |= summary.floor_violated;
    if (args.check_fano && violated) {
        std::cerr << "error floor violated in at least one sweep step\n";
        return kExitFloorViolated;
    }
    return kExitOk;
}

int cmd_verify(const VerifyArgs& args) {
    gtlab::VerifyOptions options;
    options.quick = args.quick;
    options.inject_fault = args.inject_fault;
    options.threads = args.jobs;
    const gtlab::VerifyReport report = gtlab::run_verification(options);
    for (const gtlab::CheckResult& check : report.checks) {
        std::cout << (check.passed ? "[PASS] " : "[FAIL] ") << check.name << ": " << check.detail
                  << "\n";
    }
    std::cout << report.checks.size() << " checks, " << report.n_failed() << " failed\n";
    return report.all_passed() ? kExitOk : kExitVerifyFailed;
}

void add_sim_flags(CLI::App* sub, SimArgs& args) {
    sub->add_option("--n", args.n, "population size N")->required();
    sub->add_option("--k", args.k, "number of defectives K")->required();
    sub->add_option("--model", args.model,
                    "noise-free | addition:q=<f> | dilution:u=<f> | add-dilute:q=<f>,u=<f>")
        ->required();
    sub->add_option("--strategy", args.strategy,
                    "bernoulli:p=<f|opt> | binary-split | staged:p=<f|opt>,s=<int>")
        ->required();
    sub->add_option("--tests", args.tests,
                    "test budget T (default for binary-split: K ceil(log2 N))");
    sub->add_option("--trials", args.trials, "Monte Carlo trials")->capture_default_str();
    sub->add_option("--seed", args.seed, "RNG seed")->envname("GTLAB_SEED");
    sub->add_flag("--stratified", args.stratified, "enumerate defective sets in rank order");
    sub->add_flag("--check-fano", args.check_fano, "exit 3 when the error floor is violated");
    sub->add_flag("--check-bounds", args.check_bounds, "include t_lower/t_upper in the sidecar");
    sub->add_option("--grid-step", args.grid_step, "p-grid step for p=opt and checks")
        ->capture_default_str();
    sub->add_option("--decoder", args.decoder, "decoder (only 'ml')")
        ->check(CLI::IsMember({"ml"}))
        ->capture_default_str();
    sub->add_option("--out", args.out, "write CSV here plus a <out>.json sidecar");
    sub->add_option("--jobs", args.jobs, "worker threads (0 = all cores)");
    sub->add_option("--config", args.config, "flat key=value file of defaults; flags win");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"group-testing laboratory: bounds, simulations, sweeps"};
    app.require_subcommand(1);

    BoundsArgs bounds_args;
    CLI::App* bounds_cmd = app.add_subcommand("bounds", "evaluate the test-count bounds");
    bounds_cmd->add_option("--n", bounds_args.n, "population size N")->required();
    bounds_cmd->add_option("--k", bounds_args.k, "number of defectives K")->required();
    bounds_cmd->add_option("--model", bounds_args.model, "noise model spec")->required();
    bounds_cmd->add_option("--grid-step", bounds_args.grid_step, "p-grid step")
        ->capture_default_str();
    bounds_cmd
        ->add_option("--mi-orientation", bounds_args.orientation, "as-printed | swapped")
        ->check(CLI::IsMember({"as-printed", "swapped"}))
        ->capture_default_str();
    bounds_cmd->add_option("--out", bounds_args.out, "write the JSON report here");
    bounds_cmd->add_option("--jobs", bounds_args.jobs, "worker threads (0 = all cores)");
    bounds_cmd->add_option("--config", bounds_args.config,
                           "flat key=value file of defaults; flags win");

    SimArgs sim_args;
    CLI::App* simulate_cmd = app.add_subcommand("simulate", "run one seeded experiment");
    add_sim_flags(simulate_cmd, sim_args);

    SimArgs sweep_args;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run experiments along one axis");
    add_sim_flags(sweep_cmd, sweep_args);
    sweep_cmd->add_option("--axis", sweep_args.axis, "tests | p | q | u | n")->required();
    sweep_cmd->add_option("--values", sweep_args.values, "comma-separated axis values")
        ->required();

    VerifyArgs verify_args;
    CLI::App* verify_cmd = app.add_subcommand("verify", "run the built-in check suites");
    verify_cmd->add_flag("--quick", verify_args.quick, "reduced suite, finishes in seconds");
    verify_cmd->add_flag("--inject-fault", verify_args.inject_fault)->group("");  // negative control
    verify_cmd->add_option("--jobs", verify_args.jobs, "worker threads (0 = all cores)");

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = apply_config_file(std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*bounds_cmd) return cmd_bounds(bounds_args);
        if (*simulate_cmd) return cmd_simulate(sim_args);
        if (*sweep_cmd) return cmd_sweep(sweep_args);
        if (*verify_cmd) return cmd_verify(verify_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
