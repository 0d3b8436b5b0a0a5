#include "gtlab/bounds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gtlab/combinatorics.hpp"
#include "gtlab/format.hpp"

namespace gtlab {

namespace {

constexpr const char* kEllConvention =
    "upper: ell in 1..K-1, ell=0 contributes 0 (K=1: ell=0 with numerator log2 N); "
    "lower: ell in 0..K-1";

std::vector<double> positive_prob_table(const NoiseModel& model, int k_defects) {
    std::vector<double> f(static_cast<std::size_t>(k_defects) + 1);
    for (int c = 0; c <= k_defects; ++c) f[static_cast<std::size_t>(c)] = model.positive_prob(c);
    return f;
}

int orientation_revealed(MiOrientation o, int k_defects, int ell) {
    return o == MiOrientation::AsPrinted ? ell : k_defects - ell;
}

void check_population(int n_items, int k_defects) {
    if (k_defects < 1 || k_defects >= n_items) {
        throw std::invalid_argument("bounds: need N > K >= 1");
    }
}

struct GridCell {
    double max_upper = 0.0;
    int ell_upper = 0;
    double max_lower = 0.0;
    int ell_lower = 0;
};

}  // namespace

std::string to_string(MiOrientation o) {
    return o == MiOrientation::AsPrinted ? "as-printed" : "swapped";
}

double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("binary_entropy: argument outside [0, 1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double binom_pmf(int n, int j, double p) {
    if (n < 0 || j < 0 || j > n) throw std::invalid_argument("binom_pmf: bad arguments");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binom_pmf: p outside [0, 1]");
    if (p == 0.0) return j == 0 ? 1.0 : 0.0;
    if (p == 1.0) return j == n ? 1.0 : 0.0;
    const double log_coeff =
        std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
    return std::exp(log_coeff + j * std::log(p) + (n - j) * std::log1p(-p));
}

void MiSpec::validate() const {
    if (k_defects < 1) throw std::invalid_argument("MiSpec: K must be >= 1");
    if (ell < 0 || ell >= k_defects) throw std::invalid_argument("MiSpec: ell must lie in [0, K-1]");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("MiSpec: p must lie strictly in (0, 1)");
}

double mi_from_positive_prob(std::span<const double> f, int k_defects, int revealed, double p) {
    if (static_cast<int>(f.size()) != k_defects + 1) {
        throw std::invalid_argument("mi_from_positive_prob: f must have K+1 entries");
    }
    if (revealed < 0 || revealed > k_defects) {
        throw std::invalid_argument("mi_from_positive_prob: revealed must lie in [0, K]");
    }
    for (double v : f) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("mi_from_positive_prob: f entries must be probabilities");
        }
    }

    const int r = revealed;
    const int m = k_defects - r;
    double h_revealed = 0.0;
    for (int j = 0; j <= r; ++j) {
        double mix = 0.0;
        for (int i = 0; i <= m; ++i) {
            mix += binom_pmf(m, i, p) * f[static_cast<std::size_t>(j + i)];
        }
        mix = std::clamp(mix, 0.0, 1.0);
        h_revealed += binom_pmf(r, j, p) * binary_entropy(mix);
    }

    double h_all = 0.0;
    for (int k = 0; k <= k_defects; ++k) {
        h_all += binom_pmf(k_defects, k, p) * binary_entropy(f[static_cast<std::size_t>(k)]);
    }

    return std::clamp(h_revealed - h_all, 0.0, 1.0);
}

double mutual_information(const MiSpec& spec, MiOrientation orientation) {
    spec.validate();
    const auto f = positive_prob_table(spec.model, spec.k_defects);
    const int r = orientation_revealed(orientation, spec.k_defects, spec.ell);
    return mi_from_positive_prob(f, spec.k_defects, r, spec.p);
}

double mutual_information_bruteforce(const MiSpec& spec, MiOrientation orientation) {
    spec.validate();
    if (spec.k_defects > 20) {
        throw std::invalid_argument("mutual_information_bruteforce: K must be <= 20");
    }
    const int k_total = spec.k_defects;
    // Block sizes: `a` defect indicators on the measured side, `b` on the
    // revealed side. Joint outcomes are indexed (x_a, x_b, y).
    const int a = k_total - orientation_revealed(orientation, k_total, spec.ell);
    const int b = k_total - a;
    const auto f = positive_prob_table(spec.model, k_total);
    const double p = spec.p;

    const std::size_t na = std::size_t{1} << a;
    const std::size_t nb = std::size_t{1} << b;

    auto weight = [&](std::size_t bits, int len) {
        const int ones = std::popcount(bits);
        double w = 1.0;
        for (int i = 0; i < ones; ++i) w *= p;
        for (int i = 0; i < len - ones; ++i) w *= 1.0 - p;
        return w;
    };

    std::vector<double> pa(na, 0.0);
    std::vector<double> pby(nb * 2, 0.0);
    for (std::size_t xa = 0; xa < na; ++xa) {
        const double wa = weight(xa, a);
        for (std::size_t xb = 0; xb < nb; ++xb) {
            const double wb = weight(xb, b);
            const double fpos =
                f[static_cast<std::size_t>(std::popcount(xa) + std::popcount(xb))];
            pa[xa] += wa * wb;
            pby[xb * 2 + 1] += wa * wb * fpos;
            pby[xb * 2 + 0] += wa * wb * (1.0 - fpos);
        }
    }

    double info = 0.0;
    for (std::size_t xa = 0; xa < na; ++xa) {
        const double wa = weight(xa, a);
        for (std::size_t xb = 0; xb < nb; ++xb) {
            const double wb = weight(xb, b);
            const double fpos =
                f[static_cast<std::size_t>(std::popcount(xa) + std::popcount(xb))];
            const double joint1 = wa * wb * fpos;
            const double joint0 = wa * wb * (1.0 - fpos);
            if (joint1 > 0.0) info += joint1 * std::log2(joint1 / (pa[xa] * pby[xb * 2 + 1]));
            if (joint0 > 0.0) info += joint0 * std::log2(joint0 / (pa[xa] * pby[xb * 2 + 0]));
        }
    }
    return info;
}

std::vector<double> GridSpec::points() const {
    validate();
    const int count = static_cast<int>(std::llround(1.0 / step));
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(count - 1));
    for (int i = 1; i < count; ++i) pts.push_back(i * step);
    return pts;
}

void GridSpec::validate() const {
    if (!(step > 0.0 && step < 1.0) || std::llround(1.0 / step) < 2) {
        throw std::invalid_argument("GridSpec: degenerate grid step");
    }
}

namespace {

BoundsReport compute_bounds_impl(const NoiseModel& model, int n_items, int k_defects,
                                 const BoundsOptions& options, int threads) {
    check_population(n_items, k_defects);
    const std::vector<double> grid = options.grid.points();
    const auto f = positive_prob_table(model, k_defects);
    const int n_ell = k_defects;  // rows per grid point: ell in 0..K-1

    std::vector<double> num_lower(static_cast<std::size_t>(n_ell));
    std::vector<double> num_upper(static_cast<std::size_t>(n_ell));
    for (int ell = 0; ell < n_ell; ++ell) {
        num_lower[static_cast<std::size_t>(ell)] = log2_comb(n_items - ell, k_defects - ell);
        if (k_defects == 1) {
            num_upper[static_cast<std::size_t>(ell)] = num_lower[static_cast<std::size_t>(ell)];
        } else {
            num_upper[static_cast<std::size_t>(ell)] =
                ell == 0 ? 0.0
                         : log2_comb(n_items - k_defects, ell) + log2_comb(k_defects, ell);
        }
    }

    std::vector<GridCell> cells(grid.size());
    std::vector<RatioRow> table(grid.size() * static_cast<std::size_t>(n_ell));

    const auto eval_point = [&](std::size_t gi) {
        const double p = grid[gi];
        GridCell cell;
        bool have_upper = false, have_lower = false;
        for (int ell = 0; ell < n_ell; ++ell) {
            const int r = orientation_revealed(options.orientation, k_defects, ell);
            const double info = mi_from_positive_prob(f, k_defects, r, p);
            const double nl = num_lower[static_cast<std::size_t>(ell)];
            const double nu = num_upper[static_cast<std::size_t>(ell)];
            const double ratio_lower = nl / info;
            const double ratio_upper = nu == 0.0 ? 0.0 : nu / info;
            table[gi * static_cast<std::size_t>(n_ell) + static_cast<std::size_t>(ell)] = {
                p, ell, ratio_upper, ratio_lower};
            if (!have_lower || ratio_lower > cell.max_lower) {
                cell.max_lower = ratio_lower;
                cell.ell_lower = ell;
                have_lower = true;
            }
            const bool upper_eligible = k_defects == 1 ? ell == 0 : ell >= 1;
            if (upper_eligible && (!have_upper || ratio_upper > cell.max_upper)) {
                cell.max_upper = ratio_upper;
                cell.ell_upper = ell;
                have_upper = true;
            }
        }
        cells[gi] = cell;
    };

#ifdef _OPENMP
    {
        const int max_threads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(std::max(1, max_threads))
        for (std::int64_t gi = 0; gi < static_cast<std::int64_t>(grid.size()); ++gi) {
            eval_point(static_cast<std::size_t>(gi));
        }
    }
#else
    (void)threads;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) eval_point(gi);
#endif

    BoundsReport report;
    report.n_items = n_items;
    report.k_defects = k_defects;
    report.model = model;
    report.grid_step = options.grid.step;
    report.orientation = options.orientation;
    report.table = std::move(table);

    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        const GridCell& cell = cells[gi];
        if (gi == 0 || cell.max_upper < report.t_upper) {
            report.t_upper = cell.max_upper;
            report.p_star_upper = grid[gi];
            report.ell_star_upper = cell.ell_upper;
        }
        if (gi == 0 || cell.max_lower < report.t_lower) {
            report.t_lower = cell.max_lower;
            report.p_star_lower = grid[gi];
            report.ell_star_lower = cell.ell_lower;
        }
    }
    return report;
}

}  // namespace

BoundsReport compute_bounds(const NoiseModel& model, int n_items, int k_defects,
                            const BoundsOptions& options) {
    return compute_bounds_impl(model, n_items, k_defects, options, options.threads);
}

namespace reference {

BoundsReport compute_bounds(const NoiseModel& model, int n_items, int k_defects,
                            const BoundsOptions& options) {
    return compute_bounds_impl(model, n_items, k_defects, options, 1);
}

}  // namespace reference

std::string BoundsReport::to_json() const {
    std::string out;
    out += "{\n";
    out += "  \"n\": " + std::to_string(n_items) + ",\n";
    out += "  \"k\": " + std::to_string(k_defects) + ",\n";
    out += "  \"model\": \"" + model.spec_string() + "\",\n";
    out += "  \"t_upper\": " + fmt_json_number(t_upper) + ",\n";
    out += "  \"t_lower\": " + fmt_json_number(t_lower) + ",\n";
    out += "  \"p_star_upper\": " + fmt_json_number(p_star_upper) + ",\n";
    out += "  \"p_star_lower\": " + fmt_json_number(p_star_lower) + ",\n";
    out += "  \"ell_star_upper\": " + std::to_string(ell_star_upper) + ",\n";
    out += "  \"ell_star_lower\": " + std::to_string(ell_star_lower) + ",\n";
    out += "  \"log_base\": \"bits\",\n";
    out += "  \"grid_step\": " + fmt_json_number(grid_step) + ",\n";
    out += "  \"mi_orientation\": \"" + to_string(orientation) + "\",\n";
    out += "  \"ell_convention\": \"" + std::string(kEllConvention) + "\",\n";
    out += "  \"table\": [\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
        const RatioRow& row = table[i];
        out += "    {\"p\": " + fmt_json_number(row.p) + ", \"ell\": " + std::to_string(row.ell) +
               ", \"ratio_upper\": " + fmt_json_number(row.ratio_upper) +
               ", \"ratio_lower\": " + fmt_json_number(row.ratio_lower) + "}";
        if (i + 1 < table.size()) out += ",";
        out += "\n";
    }
    out += "  ]\n";
    out += "}\n";
    return out;
}

BoundValue t_upper(const NoiseModel& model, int n_items, int k_defects, const GridSpec& grid) {
    BoundsOptions options;
    options.grid = grid;
    const BoundsReport report = compute_bounds(model, n_items, k_defects, options);
    return {report.t_upper, report.p_star_upper, report.ell_star_upper};
}

BoundValue t_lower(const NoiseModel& model, int n_items, int k_defects, const GridSpec& grid) {
    BoundsOptions options;
    options.grid = grid;
    const BoundsReport report = compute_bounds(model, n_items, k_defects, options);
    return {report.t_lower, report.p_star_lower, report.ell_star_lower};
}

FanoFloor fano_floor(const NoiseModel& model, int n_items, int k_defects, int n_tests,
                     const FanoOptions& options) {
    check_population(n_items, k_defects);
    if (n_tests < 0) throw std::invalid_argument("fano_floor: negative test count");

    std::vector<double> grid;
    if (options.mode == FanoPMode::MaxOverGrid) {
        grid = options.grid.points();
    } else if (!(options.p > 0.0 && options.p < 1.0)) {
        throw std::invalid_argument("fano_floor: p must lie strictly in (0, 1)");
    }

    const auto f = positive_prob_table(model, k_defects);
    FanoFloor result;
    bool have = false;
    for (int ell = 0; ell < k_defects; ++ell) {
        const int r = orientation_revealed(options.orientation, k_defects, ell);
        double info = 0.0;
        if (options.mode == FanoPMode::FixedP) {
            info = mi_from_positive_prob(f, k_defects, r, options.p);
        } else {
            for (double p : grid) {
                info = std::max(info, mi_from_positive_prob(f, k_defects, r, p));
            }
        }
        const double denom = log2_comb(n_items - ell, k_defects - ell);
        const double raw = 1.0 - (n_tests * info + 1.0) / denom;
        if (!have || raw > result.raw) {
            result.raw = raw;
            result.ell_star = ell;
            have = true;
        }
    }
    result.value = std::clamp(result.raw, 0.0, 1.0);
    return result;
}

}  // namespace gtlab
