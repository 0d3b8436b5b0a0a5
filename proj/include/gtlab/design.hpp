// Test-pool designs: fixed Bernoulli matrices, stage-batched Bernoulli
// strategies, and an adaptive halving search.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gtlab/rng.hpp"

namespace gtlab {

/// N x T inclusion matrix; entry (i, t) = 1 iff item i is in pool t.
/// Stored pool-major: pool t is a contiguous row of N bits.
class TestMatrix {
public:
    TestMatrix(int n_items, int n_tests);

    int n_items() const { return n_items_; }
    int n_tests() const { return n_tests_; }

    std::uint8_t at(int item, int test) const {
        return bits_[static_cast<std::size_t>(test) * static_cast<std::size_t>(n_items_) +
                     static_cast<std::size_t>(item)];
    }
    void set(int item, int test, std::uint8_t bit);

    std::span<const std::uint8_t> pool(int test) const {
        return {bits_.data() + static_cast<std::size_t>(test) * static_cast<std::size_t>(n_items_),
                static_cast<std::size_t>(n_items_)};
    }

    /// Appends one pool (length n_items) as the next test.
    void append_pool(std::span<const std::uint8_t> pool);

    /// Number of `members` included in pool `test`.
    int defectives_in_pool(int test, std::span<const int> members) const;

private:
    int n_items_;
    int n_tests_;
    std::vector<std::uint8_t> bits_;
};

/// IID Bernoulli(p) entries, drawn test-major then item-minor. 0 < p < 1.
TestMatrix gen_bernoulli_matrix(int n, int t, double p, CounterRng& rng);

enum class StrategyKind {
    Bernoulli,        // one stage covering the whole budget (nonadaptive)
    BinarySplit,      // adaptive halving search
    StagedBernoulli,  // stages of S pools; stage s is drawn only once stage s-1 resolved
};

struct Strategy {
    StrategyKind kind = StrategyKind::Bernoulli;
    double p = 0.5;         // inclusion probability (Bernoulli / StagedBernoulli)
    bool p_is_opt = false;  // "p=opt": resolve p from the lower-bound optimizer before running
    int stage_size = 0;     // StagedBernoulli only; >= 1

    /// Parses "bernoulli:p=<float|opt>", "binary-split",
    /// "staged:p=<float|opt>,s=<int>".
    static Strategy parse(const std::string& spec);
    std::string spec_string() const;
    void validate() const;
};

struct PoolStep {
    std::vector<std::uint8_t> pool;
    int outcome = 0;
};

/// One execution of a strategy against a test budget.
///
/// next_pool() must be called with the complete history of this session's own
/// pools and their outcomes, in order; a mismatched history is a contract
/// violation. Bernoulli-family pools are pre-committed a stage at a time and
/// never depend on outcomes; the halving search consumes each outcome before
/// emitting the next pool.
class StrategySession {
public:
    StrategySession(const Strategy& strategy, int n_items, int k_defects, int budget,
                    CounterRng design_rng);

    /// The next pool (bit-vector of length N), or nullopt once the session is
    /// done (budget exhausted, or the search completed).
    std::optional<std::vector<std::uint8_t>> next_pool(std::span<const PoolStep> history);

    bool done() const { return done_; }
    int pools_emitted() const { return static_cast<int>(emitted_.size()); }

    /// BinarySplit only: the defective-set estimate implied by the search
    /// transcript. Identified items first; if the search ended short (noise or
    /// budget), the set is filled deterministically with the smallest-index
    /// uncleared items, then the smallest cleared ones.
    std::vector<int> split_estimate() const;

private:
    void verify_history(std::span<const PoolStep> history);
    std::optional<std::vector<std::uint8_t>> next_bernoulli_pool();
    std::optional<std::vector<std::uint8_t>> next_split_pool();
    void split_apply_outcome(int outcome);
    void split_start_round();
    std::vector<std::uint8_t> split_block_lower_pool() const;

    Strategy strategy_;
    int n_items_;
    int k_defects_;
    int budget_;
    CounterRng rng_;
    bool done_ = false;

    std::vector<std::vector<std::uint8_t>> emitted_;
    std::size_t outcomes_seen_ = 0;

    // Bernoulli / StagedBernoulli: pools committed for the current stage.
    std::vector<std::vector<std::uint8_t>> stage_queue_;
    std::size_t stage_next_ = 0;

    // BinarySplit state. One "round" identifies (at most) one defective by
    // repeatedly testing the lower half of the current block. The block index
    // space is padded to a power of two so a round always takes exactly
    // ceil(log2 m) tests; positions >= round_items_.size() are virtual and
    // never defective.
    std::vector<int> active_;       // uncleared, unidentified items (sorted)
    std::vector<int> found_;        // identified defectives, discovery order
    std::vector<int> cleared_;      // items removed by negative pools
    std::vector<int> round_items_;  // snapshot of active_ at round start
    int block_lo_ = 0;
    int block_size_ = 0;  // power of two; 0 = no round in progress
    bool awaiting_outcome_ = false;
};

}  // namespace gtlab
