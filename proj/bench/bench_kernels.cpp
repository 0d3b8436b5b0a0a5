#include <benchmark/benchmark.h>

#include <vector>

#include "gtlab/bounds.hpp"
#include "gtlab/decoder.hpp"
#include "gtlab/design.hpp"
#include "gtlab/noise_model.hpp"
#include "gtlab/rng.hpp"

namespace {

struct DecodeFixture {
    gtlab::NoiseModel model = gtlab::NoiseModel::addition(0.1);
    gtlab::TestMatrix matrix{0, 0};
    std::vector<int> outcomes;

    DecodeFixture() {
        gtlab::CounterRng rng(12);
        matrix = gtlab::gen_bernoulli_matrix(28, 32, 0.3, rng);
        const std::vector<int> truth{3, 11, 19, 25};
        for (int t = 0; t < 32; ++t) {
            outcomes.push_back(model.sample_outcome(matrix.defectives_in_pool(t, truth), rng));
        }
    }
};

const DecodeFixture& decode_fixture() {
    static const DecodeFixture fixture;
    return fixture;
}

void BM_decode_serial(benchmark::State& state) {
    const DecodeFixture& f = decode_fixture();
    for (auto _ : state) {
        const gtlab::DecodeResult r =
            gtlab::reference::ml_decode(f.model, f.matrix, 4, f.outcomes);
        benchmark::DoNotOptimize(r.log_likelihood);
    }
}
BENCHMARK(BM_decode_serial)->Unit(benchmark::kMillisecond);

void BM_decode_parallel(benchmark::State& state) {
    const DecodeFixture& f = decode_fixture();
    gtlab::DecodeOptions options;
    options.threads = 0;
    for (auto _ : state) {
        const gtlab::DecodeResult r = gtlab::ml_decode(f.model, f.matrix, 4, f.outcomes, options);
        benchmark::DoNotOptimize(r.log_likelihood);
    }
}
BENCHMARK(BM_decode_parallel)->Unit(benchmark::kMillisecond);

void BM_bounds_serial(benchmark::State& state) {
    const gtlab::NoiseModel model = gtlab::NoiseModel::dilution(0.3);
    for (auto _ : state) {
        const gtlab::BoundsReport r = gtlab::reference::compute_bounds(model, 100, 3);
        benchmark::DoNotOptimize(r.t_lower);
    }
}
BENCHMARK(BM_bounds_serial)->Unit(benchmark::kMillisecond);

void BM_bounds_parallel(benchmark::State& state) {
    const gtlab::NoiseModel model = gtlab::NoiseModel::dilution(0.3);
    for (auto _ : state) {
        const gtlab::BoundsReport r = gtlab::compute_bounds(model, 100, 3);
        benchmark::DoNotOptimize(r.t_lower);
    }
}
BENCHMARK(BM_bounds_parallel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
