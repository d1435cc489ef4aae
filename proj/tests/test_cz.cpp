#include <catch_amalgamated.hpp>

#include <random>

#include "shiftlab/ay.hpp"
#include "shiftlab/cz.hpp"

using namespace shiftlab;

namespace {

DoubleFamily random_double_family(const Grid& g, int jcount, int kcount, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    DoubleFamily fam;
    fam.grid = g;
    for (int j = 0; j < jcount; ++j) fam.j_labels.push_back(j);
    for (int k = 0; k < kcount; ++k) fam.k_labels.push_back(k);
    fam.functions.resize(static_cast<std::size_t>(jcount));
    for (auto& row : fam.functions) {
        for (int k = 0; k < kcount; ++k) {
            GridFunction f(g);
            for (auto& v : f.values) v = cplx{gauss(rng), gauss(rng)};
            row.push_back(std::move(f));
        }
    }
    return fam;
}

// independent checker: walks every dyadic cube, recomputes averages of the
// normalized pointwise norm directly, and re-derives the maximal cubes
struct CzChecker {
    double reconstruction = 0.0;
    double mean_zero = 0.0;
    double good_bound = 0.0;
    double cube_measure = 0.0;
    bool cubes_match = true;
    bool disjoint = true;

    void run(const DoubleFamily& original, const CzDecomposition& dec, double q)
    {
        double factor = 1.0;
        const DoubleFamily norm = normalize_family(original, q, factor);
        const Grid& g = norm.grid;
        const auto a = lq_l1_pointwise(norm, q);
        const double threshold = dec.gamma * dec.alpha;

        // re-derive the maximal cubes by direct scanning
        std::vector<std::pair<int, std::int64_t>> expect;
        const int s_root = -g.length_exp;
        const int s_leaf = g.samples_exp - g.length_exp;
        auto avg_of = [&](int s, std::int64_t c) {
            const std::size_t w = detail::cube_width(g, s);
            double acc = 0.0;
            for (std::size_t i = 0; i < w; ++i) acc += a[static_cast<std::size_t>(c) * w + i];
            return acc * g.spacing * std::ldexp(1.0, s);
        };
        for (int s = s_root; s <= s_leaf; ++s) {
            for (std::int64_t c = 0; c < static_cast<std::int64_t>(detail::cube_count(g, s)); ++c) {
                if (!(avg_of(s, c) > threshold)) continue;
                bool ancestor_over = false;
                std::int64_t cc = c;
                for (int ss = s - 1; ss >= s_root; --ss) {
                    cc /= 2;
                    if (avg_of(ss, cc) > threshold) {
                        ancestor_over = true;
                        break;
                    }
                }
                if (!ancestor_over) expect.emplace_back(s, c);
            }
        }
        std::vector<std::pair<int, std::int64_t>> got;
        for (const auto& piece : dec.bad) got.emplace_back(piece.cube.side_exp, piece.cube.offset);
        std::sort(expect.begin(), expect.end());
        std::sort(got.begin(), got.end());
        cubes_match = (expect == got);

        // disjointness via sample coverage counts
        std::vector<int> cover(g.samples, 0);
        for (const auto& piece : dec.bad) {
            cube_measure += piece.cube.measure();
            for (std::size_t i = piece.first_sample; i < piece.first_sample + piece.sample_count; ++i)
                ++cover[i];
        }
        for (int c : cover)
            if (c > 1) disjoint = false;

        // reconstruction, mean-zero, and the pointwise good bound
        for (std::size_t jj = 0; jj < norm.j_count(); ++jj) {
            for (std::size_t kk = 0; kk < norm.k_count(); ++kk) {
                GridFunction sum = dec.good.functions[jj][kk];
                for (std::size_t l = 0; l < dec.bad.size(); ++l) {
                    const GridFunction b = dec.materialize_bad(norm, l, jj, kk);
                    cplx mass{0.0, 0.0};
                    for (std::size_t i = 0; i < g.samples; ++i) {
                        sum.values[i] += b.values[i];
                        mass += b.values[i];
                    }
                    const double scale = std::max(1.0, max_abs(norm.functions[jj][kk]));
                    mean_zero = std::max(mean_zero, std::abs(mass) * g.spacing / scale);
                }
                const double scale = std::max(1e-300, max_abs(norm.functions[jj][kk]));
                reconstruction =
                    std::max(reconstruction, max_abs_diff(sum, norm.functions[jj][kk]) / scale);
            }
        }
        const auto gnorm = lq_l1_pointwise(dec.good, q);
        for (double v : gnorm) good_bound = std::max(good_bound, v);
    }
};

} // namespace

TEST_CASE("no cube is selected above the sup of the pointwise norm")
{
    const Grid g = make_grid(1.0, 128);
    const DoubleFamily fam = random_double_family(g, 2, 2, 3);
    double factor = 1.0;
    const DoubleFamily norm = normalize_family(fam, 2.0, factor);
    const auto a = lq_l1_pointwise(norm, 2.0);
    double amax = 0.0;
    for (double v : a) amax = std::max(amax, v);

    const CzDecomposition dec = cz_decompose(fam, 2.0, 2.0 * amax, 1.0);
    CHECK(dec.bad.empty());
    CHECK_FALSE(dec.degenerate_root);
    for (std::size_t jj = 0; jj < norm.j_count(); ++jj)
        for (std::size_t kk = 0; kk < norm.k_count(); ++kk)
            CHECK(max_abs_diff(dec.good.functions[jj][kk], norm.functions[jj][kk]) == 0.0);
}

TEST_CASE("tall indicator: one stopping cube with the measure bound")
{
    const Grid g = make_grid(1.0, 256);
    DoubleFamily fam;
    fam.grid = g;
    fam.j_labels = {0};
    fam.k_labels = {0};
    fam.functions.resize(1);
    GridFunction f(g);
    const std::size_t w = 16;  // one cube at side 16/256 = 1/16
    for (std::size_t i = 3 * w; i < 4 * w; ++i) f.values[i] = 16.0;  // mass 1
    fam.functions[0].push_back(f);

    const double alpha = 1.0, gamma = 0.5;
    const CzDecomposition dec = cz_decompose(fam, 2.0, alpha, gamma);
    REQUIRE_FALSE(dec.bad.empty());
    double measure = 0.0;
    for (const auto& piece : dec.bad) measure += piece.cube.measure();
    CHECK(measure <= 1.0 / (gamma * alpha) + 1e-15);
    // the tall cube (or an ancestor) is among the selected cubes
    bool covered = false;
    for (const auto& piece : dec.bad) {
        if (piece.first_sample <= 3 * w && piece.first_sample + piece.sample_count >= 4 * w)
            covered = true;
    }
    CHECK(covered);
}

TEST_CASE("random families satisfy all decomposition invariants")
{
    const Grid g = make_grid(1.0, 256);
    for (std::uint64_t seed : {11, 12, 13, 14, 15}) {
        const DoubleFamily fam = random_double_family(g, 2, 3, seed);
        const double alpha = 0.75, gamma = 0.6, q = 2.0;
        const CzDecomposition dec = cz_decompose(fam, q, alpha, gamma);

        CzChecker chk;
        chk.run(fam, dec, q);
        CHECK(chk.cubes_match);
        CHECK(chk.disjoint);
        CHECK(chk.reconstruction < 1e-12);
        CHECK(chk.mean_zero < 1e-12);
        CHECK(chk.cube_measure <= 1.0 / (gamma * alpha) + 1e-15);
        CHECK(chk.good_bound <= 2.0 * gamma * alpha * (1.0 + 1e-12));
    }
}

TEST_CASE("degenerate root exceedance is flagged, not rejected")
{
    const Grid g = make_grid(1.0, 64);
    DoubleFamily fam;
    fam.grid = g;
    fam.j_labels = {0};
    fam.k_labels = {0};
    fam.functions.resize(1);
    GridFunction f(g);
    for (auto& v : f.values) v = 1.0;
    fam.functions[0].push_back(f);

    // normalized norm is identically 1; threshold below 1 trips the root
    const CzDecomposition dec = cz_decompose(fam, 2.0, 0.5, 0.5);
    CHECK(dec.degenerate_root);
    REQUIRE(dec.bad.size() == 1);
    CHECK(dec.bad[0].cube.side_exp == -g.length_exp);
}

TEST_CASE("threshold exactly at the average selects nothing (strict inequality)")
{
    const Grid g = make_grid(1.0, 64);
    DoubleFamily fam;
    fam.grid = g;
    fam.j_labels = {0};
    fam.k_labels = {0};
    fam.functions.resize(1);
    GridFunction f(g);
    for (auto& v : f.values) v = 2.0;
    fam.functions[0].push_back(f);
    // after normalization the pointwise norm is exactly 1 everywhere
    const CzDecomposition dec = cz_decompose(fam, 2.0, 1.0, 1.0);
    CHECK(dec.bad.empty());
    CHECK_FALSE(dec.degenerate_root);
}

TEST_CASE("cz rejects bad parameters")
{
    const Grid g = make_grid(1.0, 64);
    const DoubleFamily fam = random_double_family(g, 1, 1, 7);
    CHECK_THROWS(cz_decompose(fam, 1.0, 1.0, 1.0));
    CHECK_THROWS(cz_decompose(fam, 2.0, 0.0, 1.0));
    CHECK_THROWS(cz_decompose(fam, 2.0, 1.0, -1.0));
}

TEST_CASE("estimate_ay: finiteness, refinement monotonicity, convergence at y = 0")
{
    const Grid g = make_grid(64.0, 4096);
    const auto w16 = log_spaced_w(g, 16);
    const auto w32 = log_spaced_w(g, 32);

    const auto base = estimate_ay(0.0, 2.0, -8, 16, w16, g);
    CHECK(base.value > 0.0);
    CHECK(std::isfinite(base.value));

    // enlarging the j range or refining w can only increase the estimate
    const auto wider_j = estimate_ay(0.0, 2.0, -10, 20, w16, g);
    CHECK(wider_j.value >= base.value * (1.0 - 1e-13));

    std::vector<double> w_union = w16;
    w_union.insert(w_union.end(), w32.begin(), w32.end());
    const auto finer_w = estimate_ay(0.0, 2.0, -8, 16, w_union, g);
    CHECK(finer_w.value >= base.value * (1.0 - 1e-13));

    // convergence: doubling both refinements moves A_0 by < 5%
    const auto fine = estimate_ay(0.0, 2.0, -16, 32, log_spaced_w(g, 64), g);
    CHECK(std::fabs(fine.value - base.value) < 0.05 * base.value);

    // the integrand vanishes as w -> 0
    const auto tiny = estimate_ay(0.0, 2.0, -8, 4, std::vector<double>{1e-7}, g);
    CHECK(tiny.value < 0.05 * base.value);

    CHECK_THROWS(estimate_ay(0.0, 1.0, -2, 2, w16, g));
    CHECK_THROWS(estimate_ay(0.0, 2.0, -2, 2, {}, g));
}

TEST_CASE("estimate_ay warns when the middle regime is not covered")
{
    const Grid g = make_grid(64.0, 4096);
    const auto est = estimate_ay(std::exp(5.0), 2.0, 0, 2, log_spaced_w(g, 8), g);
    CHECK_FALSE(est.warnings.empty());
}
