#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gtlab/design.hpp"
#include "gtlab/rng.hpp"

using namespace gtlab;

namespace {

int ceil_log2(int m) {
    int d = 0;
    while ((1 << d) < m) ++d;
    return d;
}

int noise_free_outcome(const std::vector<std::uint8_t>& pool, const std::vector<int>& truth) {
    for (int item : truth) {
        if (pool[static_cast<std::size_t>(item)]) return 1;
    }
    return 0;
}

struct SplitRun {
    int tests = 0;
    std::vector<int> estimate;
};

SplitRun run_split_noise_free(int n, const std::vector<int>& truth, int budget) {
    StrategySession session(Strategy::parse("binary-split"), n,
                            static_cast<int>(truth.size()), budget, CounterRng(0));
    std::vector<PoolStep> history;
    while (auto pool = session.next_pool(history)) {
        const int y = noise_free_outcome(*pool, truth);
        history.push_back({std::move(*pool), y});
    }
    return {session.pools_emitted(), session.split_estimate()};
}

}  // namespace

TEST_CASE("bernoulli matrix is deterministic for a seed") {
    CounterRng r1(77), r2(77);
    const TestMatrix a = gen_bernoulli_matrix(4, 3, 0.5, r1);
    const TestMatrix b = gen_bernoulli_matrix(4, 3, 0.5, r2);
    for (int t = 0; t < 3; ++t) {
        for (int i = 0; i < 4; ++i) CHECK(a.at(i, t) == b.at(i, t));
    }
}

TEST_CASE("bernoulli matrix entry frequency matches p") {
    CounterRng rng(123);
    const TestMatrix m = gen_bernoulli_matrix(1000, 100, 0.3, rng);
    long long ones = 0;
    for (int t = 0; t < 100; ++t) {
        for (int i = 0; i < 1000; ++i) ones += m.at(i, t);
    }
    const double freq = static_cast<double>(ones) / 100000.0;
    CHECK(std::abs(freq - 0.3) <= 0.005);
}

TEST_CASE("bernoulli matrix rejects degenerate p") {
    CounterRng rng(1);
    CHECK_THROWS_AS(gen_bernoulli_matrix(4, 2, 0.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(gen_bernoulli_matrix(4, 2, 1.0, rng), std::invalid_argument);
    CHECK_NOTHROW(gen_bernoulli_matrix(2, 2, 1.0 - 1e-15, rng));
}

TEST_CASE("matrix pool access and append") {
    TestMatrix m(3, 0);
    m.append_pool(std::vector<std::uint8_t>{1, 0, 1});
    m.append_pool(std::vector<std::uint8_t>{0, 1, 0});
    CHECK(m.n_tests() == 2);
    CHECK(m.at(0, 0) == 1);
    CHECK(m.at(1, 0) == 0);
    CHECK(m.at(1, 1) == 1);
    const std::vector<int> members{0, 2};
    CHECK(m.defectives_in_pool(0, members) == 2);
    CHECK(m.defectives_in_pool(1, members) == 0);
    CHECK_THROWS_AS(m.append_pool(std::vector<std::uint8_t>{1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(m.set(3, 0, 1), std::out_of_range);
}

TEST_CASE("strategy specs parse and round-trip") {
    const Strategy b = Strategy::parse("bernoulli:p=0.25");
    CHECK(b.kind == StrategyKind::Bernoulli);
    CHECK(b.p == doctest::Approx(0.25));
    CHECK(b.spec_string() == "bernoulli:p=0.25");

    const Strategy o = Strategy::parse("bernoulli:p=opt");
    CHECK(o.p_is_opt);
    CHECK(o.spec_string() == "bernoulli:p=opt");

    const Strategy s = Strategy::parse("staged:p=0.3,s=5");
    CHECK(s.kind == StrategyKind::StagedBernoulli);
    CHECK(s.stage_size == 5);
    CHECK(s.spec_string() == "staged:p=0.3,s=5");
    CHECK(Strategy::parse("staged:s=5,p=0.3").spec_string() == "staged:p=0.3,s=5");

    CHECK(Strategy::parse("binary-split").kind == StrategyKind::BinarySplit);

    CHECK_THROWS_AS(Strategy::parse("bernoulli"), std::invalid_argument);
    CHECK_THROWS_AS(Strategy::parse("bernoulli:p=0"), std::invalid_argument);
    CHECK_THROWS_AS(Strategy::parse("bernoulli:p=1"), std::invalid_argument);
    CHECK_THROWS_AS(Strategy::parse("bernoulli:p=0.5,s=2"), std::invalid_argument);
    CHECK_THROWS_AS(Strategy::parse("binary-split:p=0.5"), std::invalid_argument);
    CHECK_THROWS_AS(Strategy::parse("staged:p=0.5"), std::invalid_argument);
    CHECK_THROWS_AS(Strategy::parse("staged:p=0.5,s=0"), std::invalid_argument);
    CHECK_THROWS_AS(Strategy::parse("staged:p=0.5,s=2,s=3"), std::invalid_argument);
    CHECK_THROWS_AS(Strategy::parse("nope"), std::invalid_argument);
}

TEST_CASE("single-stage pools equal the matrix columns for the same seed") {
    const int n = 12, t = 9;
    CounterRng mat_rng(555);
    const TestMatrix m = gen_bernoulli_matrix(n, t, 0.4, mat_rng);

    for (const char* spec : {"bernoulli:p=0.4", "staged:p=0.4,s=9", "staged:p=0.4,s=4"}) {
        StrategySession session(Strategy::parse(spec), n, 2, t, CounterRng(555));
        std::vector<PoolStep> history;
        int idx = 0;
        while (auto pool = session.next_pool(history)) {
            const auto expected = m.pool(idx);
            REQUIRE(pool->size() == expected.size());
            for (std::size_t i = 0; i < expected.size(); ++i) CHECK((*pool)[i] == expected[i]);
            history.push_back({std::move(*pool), idx % 2});
            ++idx;
        }
        CHECK(idx == t);
        CHECK(session.done());
    }
}

TEST_CASE("pre-committed pools ignore outcomes") {
    for (const char* spec : {"bernoulli:p=0.5", "staged:p=0.5,s=3"}) {
        StrategySession zeros(Strategy::parse(spec), 10, 2, 8, CounterRng(99));
        StrategySession ones(Strategy::parse(spec), 10, 2, 8, CounterRng(99));
        std::vector<PoolStep> h0, h1;
        for (;;) {
            auto p0 = zeros.next_pool(h0);
            auto p1 = ones.next_pool(h1);
            CHECK(p0.has_value() == p1.has_value());
            if (!p0) break;
            CHECK(*p0 == *p1);
            h0.push_back({std::move(*p0), 0});
            h1.push_back({std::move(*p1), 1});
        }
    }
}

TEST_CASE("history must match the emitted pools") {
    StrategySession session(Strategy::parse("bernoulli:p=0.5"), 6, 1, 4, CounterRng(4));
    std::vector<PoolStep> history;
    auto p0 = session.next_pool(history);
    REQUIRE(p0.has_value());

    CHECK_THROWS_AS(session.next_pool(history), std::invalid_argument);  // outcome missing

    std::vector<PoolStep> tampered{{std::vector<std::uint8_t>(6, 1), 0}};
    if (tampered[0].pool == *p0) tampered[0].pool[0] ^= 1;
    CHECK_THROWS_AS(session.next_pool(tampered), std::invalid_argument);

    history.push_back({*p0, 0});
    CHECK_NOTHROW(session.next_pool(history));
}

TEST_CASE("halving trace for eight items") {
    StrategySession session(Strategy::parse("binary-split"), 8, 1, 3, CounterRng(0));
    const std::vector<int> truth{5};
    std::vector<PoolStep> history;

    auto p1 = session.next_pool(history);
    REQUIRE(p1.has_value());
    CHECK(*p1 == std::vector<std::uint8_t>{1, 1, 1, 1, 0, 0, 0, 0});
    history.push_back({std::move(*p1), 0});

    auto p2 = session.next_pool(history);
    REQUIRE(p2.has_value());
    CHECK(*p2 == std::vector<std::uint8_t>{0, 0, 0, 0, 1, 1, 0, 0});
    history.push_back({std::move(*p2), 1});

    auto p3 = session.next_pool(history);
    REQUIRE(p3.has_value());
    CHECK(*p3 == std::vector<std::uint8_t>{0, 0, 0, 0, 1, 0, 0, 0});
    history.push_back({std::move(*p3), 0});

    CHECK(!session.next_pool(history).has_value());
    CHECK(session.done());
    CHECK(session.pools_emitted() == 3);
    CHECK(session.split_estimate() == truth);
}

TEST_CASE("halving finds any single defective in exactly ceil(log2 N) tests") {
    for (int n : {2, 3, 5, 7, 8, 16, 100, 365, 512, 1000, 1024}) {
        const int expected = ceil_log2(n);
        for (int d = 0; d < n; ++d) {
            const SplitRun run = run_split_noise_free(n, {d}, expected + 4);
            CHECK(run.tests == expected);
            CHECK(run.estimate == std::vector<int>{d});
        }
    }
}

TEST_CASE("halving at sixteen thousand items, every position") {
    const int n = 16384;
    std::atomic<int> failures{0};
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 256)
#endif
    for (int d = 0; d < n; ++d) {
        const SplitRun run = run_split_noise_free(n, {d}, 20);
        if (run.tests != 14 || run.estimate != std::vector<int>{d}) ++failures;
    }
    CHECK(failures.load() == 0);
}

TEST_CASE("generalized splitting recovers several defectives") {
    SUBCASE("every pair and triple of six items") {
        for (int k : {2, 3}) {
            std::vector<int> truth(static_cast<std::size_t>(k));
            for (int i = 0; i < k; ++i) truth[static_cast<std::size_t>(i)] = i;
            do {
                const SplitRun run = run_split_noise_free(6, truth, 20);
                CHECK(run.estimate == truth);
            } while ([&] {
                for (int i = k - 1; i >= 0; --i) {
                    if (truth[static_cast<std::size_t>(i)] < 6 - k + i) {
                        ++truth[static_cast<std::size_t>(i)];
                        for (int j = i + 1; j < k; ++j) {
                            truth[static_cast<std::size_t>(j)] =
                                truth[static_cast<std::size_t>(j - 1)] + 1;
                        }
                        return true;
                    }
                }
                return false;
            }());
        }
    }

    SUBCASE("rounds remove one defective each, smallest first") {
        // Rounds search 30, then 25, then 16 items: negatives clear whole
        // half-blocks, so later rounds start from a shrunken active set.
        const SplitRun run = run_split_noise_free(30, {4, 17, 29}, 15);
        CHECK(run.tests == 14);
        CHECK(run.estimate == std::vector<int>{4, 17, 29});
    }
}

TEST_CASE("splitting under hostile outcomes stays well formed") {
    SUBCASE("all-negative answers clear everything and stop") {
        StrategySession session(Strategy::parse("binary-split"), 3, 1, 10, CounterRng(0));
        std::vector<PoolStep> history;
        while (auto pool = session.next_pool(history)) history.push_back({std::move(*pool), 0});
        CHECK(session.pools_emitted() == 2);
        CHECK(session.split_estimate() == std::vector<int>{0});
    }

    SUBCASE("random answers terminate within budget with a size-K estimate") {
        CounterRng noise(31337);
        for (int rep = 0; rep < 50; ++rep) {
            StrategySession session(Strategy::parse("binary-split"), 16, 2, 12, CounterRng(0));
            std::vector<PoolStep> history;
            while (auto pool = session.next_pool(history)) {
                history.push_back({std::move(*pool), noise.bernoulli(0.5) ? 1 : 0});
            }
            CHECK(session.pools_emitted() <= 12);
            const std::vector<int> est = session.split_estimate();
            REQUIRE(est.size() == 2);
            CHECK(est[0] >= 0);
            CHECK(est[0] < est[1]);
            CHECK(est[1] < 16);
        }
    }
}

TEST_CASE("budget exhaustion ends the session") {
    StrategySession session(Strategy::parse("binary-split"), 1024, 1, 4, CounterRng(0));
    std::vector<PoolStep> history;
    const std::vector<int> truth{777};
    while (auto pool = session.next_pool(history)) {
        const int y = noise_free_outcome(*pool, truth);
        history.push_back({std::move(*pool), y});
    }
    CHECK(session.pools_emitted() == 4);
    CHECK(session.done());
    CHECK(session.split_estimate().size() == 1);
}

TEST_CASE("session rejects unresolved p") {
    CHECK_THROWS_AS(StrategySession(Strategy::parse("bernoulli:p=opt"), 8, 1, 4, CounterRng(0)),
                    std::invalid_argument);
}
