#include "gtlab/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gtlab/combinatorics.hpp"

namespace gtlab {

namespace {

void check_inputs(const TestMatrix& matrix, std::span<const int> outcomes) {
    if (static_cast<int>(outcomes.size()) != matrix.n_tests()) {
        throw std::invalid_argument("decode: outcome count != test count");
    }
    for (int y : outcomes) {
        if (y != 0 && y != 1) throw std::invalid_argument("decode: outcomes must be 0 or 1");
    }
}

// Shared by the free likelihood function and both decoders so that every code
// path produces the identical floating-point value for a given candidate.
double candidate_log_likelihood(const TestMatrix& matrix, std::span<const int> candidate,
                                std::span<const int> outcomes,
                                std::span<const double> log_pos, std::span<const double> log_neg) {
    double ll = 0.0;
    for (int t = 0; t < matrix.n_tests(); ++t) {
        const int count = matrix.defectives_in_pool(t, candidate);
        ll += outcomes[static_cast<std::size_t>(t)] ? log_pos[static_cast<std::size_t>(count)]
                                                    : log_neg[static_cast<std::size_t>(count)];
    }
    return ll;
}

void fill_log_tables(const NoiseModel& model, int k, std::vector<double>& log_pos,
                     std::vector<double>& log_neg) {
    log_pos.resize(static_cast<std::size_t>(k) + 1);
    log_neg.resize(static_cast<std::size_t>(k) + 1);
    for (int c = 0; c <= k; ++c) {
        const double f = model.positive_prob(c);
        log_pos[static_cast<std::size_t>(c)] = std::log(f);
        log_neg[static_cast<std::size_t>(c)] = std::log1p(-f);
    }
}

struct ChunkBest {
    double ll = -std::numeric_limits<double>::infinity();
    std::uint64_t first_rank = 0;
    std::uint64_t ties = 0;
};

// Scans candidate ranks [begin, end) in lexicographic order.
ChunkBest scan_chunk(const TestMatrix& matrix, int k, std::span<const int> outcomes,
                     std::span<const double> log_pos, std::span<const double> log_neg,
                     std::uint64_t begin, std::uint64_t end) {
    ChunkBest best;
    std::vector<int> candidate = unrank_combination(begin, matrix.n_items(), k);
    bool have = false;
    for (std::uint64_t rank = begin; rank < end; ++rank) {
        const double ll =
            candidate_log_likelihood(matrix, candidate, outcomes, log_pos, log_neg);
        if (!have || ll > best.ll) {
            best.ll = ll;
            best.first_rank = rank;
            best.ties = 1;
            have = true;
        } else if (ll == best.ll) {
            ++best.ties;
        }
        if (rank + 1 < end) next_combination(candidate, matrix.n_items());
    }
    return best;
}

DecodeResult decode_impl(const NoiseModel& model, const TestMatrix& matrix, int k_defects,
                         std::span<const int> outcomes, int threads) {
    check_inputs(matrix, outcomes);
    const int n = matrix.n_items();
    if (k_defects < 0 || k_defects > n) throw std::invalid_argument("decode: bad defect count");
    const auto total = comb_count(n, k_defects, kMaxDecodeCandidates);
    if (!total) {
        throw CapacityError("decode: C(" + std::to_string(n) + ", " + std::to_string(k_defects) +
                            ") exceeds the candidate cap of " +
                            std::to_string(kMaxDecodeCandidates));
    }

    std::vector<double> log_pos, log_neg;
    fill_log_tables(model, k_defects, log_pos, log_neg);

    const std::uint64_t m = *total;
    int n_chunks = 1;
#ifdef _OPENMP
    if (threads != 1) {
        const int max_threads = threads > 0 ? threads : omp_get_max_threads();
        n_chunks = static_cast<int>(std::min<std::uint64_t>(m, static_cast<std::uint64_t>(
                                                                   std::max(1, max_threads))));
    }
#else
    (void)threads;
#endif

    std::vector<ChunkBest> parts(static_cast<std::size_t>(n_chunks));
#ifdef _OPENMP
#pragma omp parallel for schedule(static, 1) num_threads(n_chunks)
#endif
    for (int c = 0; c < n_chunks; ++c) {
        const std::uint64_t begin = m * static_cast<std::uint64_t>(c) /
                                    static_cast<std::uint64_t>(n_chunks);
        const std::uint64_t end = m * (static_cast<std::uint64_t>(c) + 1) /
                                  static_cast<std::uint64_t>(n_chunks);
        parts[static_cast<std::size_t>(c)] =
            scan_chunk(matrix, k_defects, outcomes, log_pos, log_neg, begin, end);
    }

    ChunkBest merged;
    bool have = false;
    for (const ChunkBest& part : parts) {
        if (part.ties == 0) continue;
        if (!have || part.ll > merged.ll) {
            merged = part;
            have = true;
        } else if (part.ll == merged.ll) {
            merged.ties += part.ties;
        }
    }

    DecodeResult result;
    result.estimate = unrank_combination(merged.first_rank, n, k_defects);
    result.log_likelihood = merged.ll;
    result.n_ties = merged.ties;
    return result;
}

}  // namespace

double log_likelihood(const NoiseModel& model, const TestMatrix& matrix,
                      std::span<const int> candidate, std::span<const int> outcomes) {
    check_inputs(matrix, outcomes);
    int prev = -1;
    for (int item : candidate) {
        if (item <= prev || item >= matrix.n_items()) {
            throw std::invalid_argument("log_likelihood: candidate must be ascending item indices");
        }
        prev = item;
    }
    std::vector<double> log_pos, log_neg;
    fill_log_tables(model, static_cast<int>(candidate.size()), log_pos, log_neg);
    return candidate_log_likelihood(matrix, candidate, outcomes, log_pos, log_neg);
}

DecodeResult ml_decode(const NoiseModel& model, const TestMatrix& matrix, int k_defects,
                       std::span<const int> outcomes, const DecodeOptions& options) {
    return decode_impl(model, matrix, k_defects, outcomes, options.threads);
}

namespace reference {

DecodeResult ml_decode(const NoiseModel& model, const TestMatrix& matrix, int k_defects,
                       std::span<const int> outcomes) {
    return decode_impl(model, matrix, k_defects, outcomes, 1);
}

}  // namespace reference

}  // namespace gtlab
