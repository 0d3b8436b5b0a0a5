#pragma once

#include <span>
#include <string>
#include <vector>

#include "gtlab/noise_model.hpp"

namespace gtlab {

// All information quantities are in bits (log base 2).

// h(x) = -x log2 x - (1-x) log2 (1-x); h(0) = h(1) = 0. Throws outside [0, 1].
double binary_entropy(double x);

// C(n, j) p^j (1-p)^(n-j), evaluated through log-gamma.
double binom_pmf(int n, int j, double p);

// Which of the two disjoint blocks of defectives counts as "measured" when
// evaluating I(measured : revealed, Y). AsPrinted measures the K - ell
// unrevealed defectives; Swapped exchanges the roles of the two blocks.
enum class MiOrientation { AsPrinted, Swapped };

std::string to_string(MiOrientation o);

struct MiSpec {
    NoiseModel model;
    int k_defects = 1;      // K
    int ell = 0;            // size of the revealed block, in [0, K-1]
    double p = 0.5;         // Bernoulli design inclusion probability, in (0, 1)

    void validate() const;
};

// Closed-form evaluation via count sufficiency:
//   I = H(Y | X_revealed) - H(Y | X_all),
//   H(Y | X_revealed) = sum_j Bin(r, p, j) h( sum_i Bin(K-r, p, i) f(j+i) ),
//   H(Y | X_all)      = sum_k Bin(K, p, k) h(f(k)),
// where r is the revealed-block size for the chosen orientation and f is the
// model's positive-outcome probability. Result clamped to [0, 1] bits.
double mutual_information(const MiSpec& spec, MiOrientation orientation = MiOrientation::AsPrinted);

// Same quantity from an explicit f-table (f[c] for c = 0..k_defects), with no
// model object involved. The table-driven core exists so callers can perturb
// f and watch the identity break. revealed may be any value in [0, k_defects].
double mi_from_positive_prob(std::span<const double> f, int k_defects, int revealed, double p);

// Independent oracle: enumerates all 2^K defect-indicator assignments with
// product Bernoulli(p) weights, builds the full joint distribution of
// (X_measured, X_revealed, Y), and computes the mutual information directly
// from it. Requires K <= 20.
double mutual_information_bruteforce(const MiSpec& spec,
                                     MiOrientation orientation = MiOrientation::AsPrinted);

struct GridSpec {
    double step = 0.01;

    // {step, 2 step, ..., 1 - step}; endpoints excluded (zero-information designs).
    std::vector<double> points() const;
    void validate() const;
};

struct RatioRow {
    double p = 0.0;
    int ell = 0;
    double ratio_upper = 0.0;
    double ratio_lower = 0.0;
};

struct BoundsOptions {
    GridSpec grid{};
    MiOrientation orientation = MiOrientation::AsPrinted;
    int threads = 0;  // 0 = library default
};

struct BoundsReport {
    int n_items = 0;
    int k_defects = 0;
    NoiseModel model;
    double t_upper = 0.0;
    double t_lower = 0.0;
    double p_star_upper = 0.0;
    double p_star_lower = 0.0;
    int ell_star_upper = 0;
    int ell_star_lower = 0;
    double grid_step = 0.0;
    MiOrientation orientation = MiOrientation::AsPrinted;
    std::vector<RatioRow> table;  // p ascending, ell ascending within each p

    std::string to_json() const;
};

// Grid evaluation of both test-count bounds.
//
// Lower: for each grid p, max over ell in {0..K-1} of
//        log2 C(N-ell, K-ell) / I(ell, p); minimized over p.
// Upper: for each grid p, max over ell in {1..K-1} of
//        log2 [C(N-K, ell) C(K, ell)] / I(ell, p); minimized over p.
//        ell = 0 contributes ratio 0. For K = 1 that maximand set is empty,
//        so the upper bound reuses the lower bound's ell = 0 term (numerator
//        log2 C(N, 1) = log2 N), making the two bounds coincide there.
// Ties in argmin/argmax resolve to the smallest p / smallest ell.
BoundsReport compute_bounds(const NoiseModel& model, int n_items, int k_defects,
                            const BoundsOptions& options = {});

namespace reference {

// Single-threaded grid scan used to pin down the parallel kernel in tests.
// Produces bit-identical reports to compute_bounds.
BoundsReport compute_bounds(const NoiseModel& model, int n_items, int k_defects,
                            const BoundsOptions& options = {});

}  // namespace reference

struct BoundValue {
    double value = 0.0;
    double p_star = 0.0;
    int ell_star = 0;
};

BoundValue t_upper(const NoiseModel& model, int n_items, int k_defects, const GridSpec& grid = {});
BoundValue t_lower(const NoiseModel& model, int n_items, int k_defects, const GridSpec& grid = {});

// How the per-test information rate is chosen when evaluating the error floor.
// FixedP uses I at one design density; MaxOverGrid maximizes I over the grid,
// which makes the floor valid for any strategy, adaptive ones included.
enum class FanoPMode { FixedP, MaxOverGrid };

struct FanoOptions {
    FanoPMode mode = FanoPMode::MaxOverGrid;
    double p = 0.5;  // FixedP only
    GridSpec grid{};
    MiOrientation orientation = MiOrientation::AsPrinted;
};

struct FanoFloor {
    double value = 0.0;  // clamped to [0, 1]
    double raw = 0.0;    // unclamped; negative means the floor is not binding
    int ell_star = 0;
};

// max over ell in {0..K-1} of 1 - (T I(ell) + 1) / log2 C(N-ell, K-ell),
// clamped to [0, 1].
FanoFloor fano_floor(const NoiseModel& model, int n_items, int k_defects, int n_tests,
                     const FanoOptions& options = {});

}  // namespace gtlab
