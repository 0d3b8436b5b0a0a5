// Exact subset counting, ranking and enumeration for small instances,
// plus log-space binomial coefficients for large ones.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace gtlab {

/// C(n, k) as an exact integer, or nullopt when the value exceeds `limit`.
/// Partial products of the multiplicative scheme are themselves binomial
/// coefficients, so the early-exit check is sound.
inline std::optional<std::uint64_t> comb_count(int n, int k, std::uint64_t limit) {
    if (n < 0 || k < 0 || k > n) return std::uint64_t{0};
    if (k > n - k) k = n - k;
    std::uint64_t c = 1;
    for (int i = 0; i < k; ++i) {
        c = c * static_cast<std::uint64_t>(n - i) / static_cast<std::uint64_t>(i + 1);
        if (c > limit) return std::nullopt;
    }
    return c;
}

/// C(n, k) for domains known to be small; throws instead of overflowing.
inline std::uint64_t comb_count_exact(int n, int k) {
    auto c = comb_count(n, k, std::uint64_t{1} << 60);
    if (!c) throw std::overflow_error("comb_count_exact: binomial coefficient too large");
    return *c;
}

/// log2 C(n, k) via log-gamma; stable for large n.
inline double log2_comb(int n, int k) {
    if (n < 0 || k < 0 || k > n) {
        throw std::invalid_argument("log2_comb: require 0 <= k <= n");
    }
    constexpr double ln2 = 0.6931471805599453094172321215;
    return (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) / ln2;
}

/// {0, 1, ..., k-1}: the lexicographically first size-k subset.
inline std::vector<int> first_combination(int k) {
    std::vector<int> c(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) c[static_cast<std::size_t>(i)] = i;
    return c;
}

/// Advance a sorted size-k subset of [0, n) to its lexicographic successor.
/// Returns false when `c` was already the last subset.
inline bool next_combination(std::span<int> c, int n) {
    const int k = static_cast<int>(c.size());
    for (int i = k - 1; i >= 0; --i) {
        if (c[static_cast<std::size_t>(i)] < n - k + i) {
            ++c[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < k; ++j) {
                c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
            }
            return true;
        }
    }
    return false;
}

/// The size-k subset of [0, n) with the given lexicographic rank.
inline std::vector<int> unrank_combination(std::uint64_t rank, int n, int k) {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(k));
    int lo = 0;
    for (int j = 0; j < k; ++j) {
        for (int v = lo;; ++v) {
            if (v >= n) throw std::invalid_argument("unrank_combination: rank out of range");
            const std::uint64_t block = comb_count_exact(n - v - 1, k - j - 1);
            if (rank < block) {
                out.push_back(v);
                lo = v + 1;
                break;
            }
            rank -= block;
        }
    }
    return out;
}

}  // namespace gtlab
