#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "gtlab/design.hpp"
#include "gtlab/noise_model.hpp"

namespace gtlab {

// Exhaustive decode walks every k-subset, so the candidate count is capped.
inline constexpr std::uint64_t kMaxDecodeCandidates = 10'000'000;

class CapacityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct DecodeResult {
    std::vector<int> estimate;  // ascending item indices
    double log_likelihood = 0.0;
    std::uint64_t n_ties = 0;  // candidates sharing the best likelihood, winner included
};

struct DecodeOptions {
    int threads = 0;  // 0 = library default
};

// Natural-log likelihood of the outcome vector given that exactly the items in
// `candidate` (ascending, unique) are defective. Outcomes with probability
// zero contribute -infinity.
double log_likelihood(const NoiseModel& model, const TestMatrix& matrix,
                      std::span<const int> candidate, std::span<const int> outcomes);

// Maximum-likelihood decode over all C(n, k) candidate sets, enumerated in
// lexicographic order. Likelihoods are compared exactly; ties resolve to the
// lexicographically first candidate. Throws CapacityError when C(n, k)
// exceeds kMaxDecodeCandidates.
DecodeResult ml_decode(const NoiseModel& model, const TestMatrix& matrix, int k_defects,
                       std::span<const int> outcomes, const DecodeOptions& options = {});

namespace reference {

// Single-threaded decode used to pin down the parallel kernel in tests.
// Produces bit-identical results to ml_decode.
DecodeResult ml_decode(const NoiseModel& model, const TestMatrix& matrix, int k_defects,
                       std::span<const int> outcomes);

}  // namespace reference

}  // namespace gtlab
