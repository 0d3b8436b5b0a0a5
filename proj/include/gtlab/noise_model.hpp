// Binary test-outcome channels in which only the number of defectives in a
// pool matters: P(positive | k defectives) = f(k).
#pragma once

#include <string>

#include "gtlab/rng.hpp"

namespace gtlab {

enum class NoiseKind {
    NoiseFree,  // f(0) = 0, f(k>=1) = 1
    Addition,   // f(0) = q, f(k>=1) = 1            (false positives)
    Dilution,   // f(0) = 0, f(k>=1) = 1 - u^k      (false negatives)
    AddDilute,  // f(0) = q, f(k>=1) = 1 - u^k(1-q) (dilution first, then addition)
};

class NoiseModel {
public:
    /// Default model is noise-free.
    NoiseModel() = default;

    static NoiseModel noise_free();
    static NoiseModel addition(double q);
    static NoiseModel dilution(double u);
    static NoiseModel add_dilute(double q, double u);

    /// Parses "noise-free", "addition:q=<f>", "dilution:u=<f>",
    /// "add-dilute:q=<f>,u=<f>". Throws std::invalid_argument on anything else.
    static NoiseModel parse(const std::string& spec);

    NoiseKind kind() const { return kind_; }
    double q() const { return q_; }
    double u() const { return u_; }

    /// f(k) = P(Y = 1 | k defectives in the pool); non-decreasing in k.
    double positive_prob(int k) const;

    /// One Bernoulli(f(k)) draw; always consumes exactly one value from the
    /// stream so test outcomes stay index-addressable.
    int sample_outcome(int k, CounterRng& rng) const;

    /// Canonical spec string, parseable by parse().
    std::string spec_string() const;

    bool operator==(const NoiseModel&) const = default;

private:
    NoiseModel(NoiseKind kind, double q, double u);

    NoiseKind kind_ = NoiseKind::NoiseFree;
    double q_ = 0.0;
    double u_ = 0.0;
};

}  // namespace gtlab
