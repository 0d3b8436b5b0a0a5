#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "gtlab/rng.hpp"

using namespace gtlab;

TEST_CASE("same key gives the same sequence") {
    CounterRng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different keys give different sequences") {
    CounterRng a(1), b(2);
    int same = 0;
    for (int i = 0; i < 64; ++i) same += a.next_u64() == b.next_u64();
    CHECK(same == 0);
}

TEST_CASE("next_double lies in [0, 1)") {
    CounterRng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double x = rng.next_double();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
}

TEST_CASE("next_double mean is near one half") {
    CounterRng rng(11);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += rng.next_double();
    const double sigma = std::sqrt(1.0 / 12.0 / n);
    CHECK(std::abs(sum / n - 0.5) < 4.0 * sigma);
}

TEST_CASE("bernoulli consumes exactly one draw") {
    CounterRng rng(3);
    const auto before = rng.position();
    rng.bernoulli(0.0);
    CHECK(rng.position() == before + 1);
    rng.bernoulli(1.0);
    CHECK(rng.position() == before + 2);
    rng.bernoulli(0.37);
    CHECK(rng.position() == before + 3);
}

TEST_CASE("bernoulli frequency tracks its parameter") {
    CounterRng rng(5);
    int ones = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) ones += rng.bernoulli(0.3) ? 1 : 0;
    const double sigma = std::sqrt(0.3 * 0.7 / n);
    CHECK(std::abs(ones / static_cast<double>(n) - 0.3) < 4.0 * sigma);
}

TEST_CASE("below stays in range and covers it") {
    CounterRng rng(9);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const std::uint64_t v = rng.below(7);
        CHECK(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
    CHECK(rng.below(1) == 0);
}

TEST_CASE("trial streams are independent across trials and roles") {
    CounterRng a = trial_stream(100, 0, StreamRole::DefectDraw);
    CounterRng b = trial_stream(100, 1, StreamRole::DefectDraw);
    CounterRng c = trial_stream(100, 0, StreamRole::Channel);
    CounterRng d = trial_stream(100, 0, StreamRole::Design);
    std::vector<std::uint64_t> va, vb, vc, vd;
    for (int i = 0; i < 16; ++i) {
        va.push_back(a.next_u64());
        vb.push_back(b.next_u64());
        vc.push_back(c.next_u64());
        vd.push_back(d.next_u64());
    }
    CHECK(va != vb);
    CHECK(va != vc);
    CHECK(va != vd);
    CHECK(vc != vd);

    CounterRng a2 = trial_stream(100, 0, StreamRole::DefectDraw);
    for (std::uint64_t v : va) CHECK(a2.next_u64() == v);
}

TEST_CASE("sweep seeds are deterministic and distinct") {
    CHECK(derive_sweep_seed(5, 0) == derive_sweep_seed(5, 0));
    CHECK(derive_sweep_seed(5, 0) != derive_sweep_seed(5, 1));
    CHECK(derive_sweep_seed(5, 0) != derive_sweep_seed(6, 0));
}

TEST_CASE("works as a standard URBG") {
    CounterRng rng(13);
    std::vector<int> items{0, 1, 2, 3, 4, 5, 6, 7};
    std::shuffle(items.begin(), items.end(), rng);
    std::vector<int> sorted = items;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
}
