#pragma once

// Norms and diagnostic functionals: L^p, mixed L^p(l^q), weak L^{1,inf},
// the Carleson/BMO-style cube functional, the H^p norm, and the sharp
// maximal functionals.
//
// Families can be supplied either materialized (LevelFamily) or as a
// LevelSource generator; the big sweeps stream levels one at a time so a
// family never has to be resident all at once.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "shiftlab/dyadic.hpp"
#include "shiftlab/filters.hpp"
#include "shiftlab/grid.hpp"

namespace shiftlab {

enum class NormVariant { Strong, WeakL1, Carleson };

struct MixedNormSpec {
    double p = 2.0;  // in (0, inf]
    double q = 2.0;  // in (0, inf]
    NormVariant variant = NormVariant::Strong;
};

struct LevelFamily {
    Grid grid;
    int k_min = 0;
    int k_max = -1;
    std::vector<GridFunction> functions;  // functions[k - k_min]

    int level_count() const { return k_max - k_min + 1; }
    const GridFunction& at_level(int k) const { return functions.at(static_cast<std::size_t>(k - k_min)); }
};

// Generator form of a family: levels in ascending order, produced on demand.
struct LevelSource {
    Grid grid;
    std::vector<int> levels;
    std::function<GridFunction(int)> make;
};

inline LevelSource as_source(const LevelFamily& f)
{
    LevelSource s;
    s.grid = f.grid;
    for (int k = f.k_min; k <= f.k_max; ++k) s.levels.push_back(k);
    s.make = [&f](int k) { return f.at_level(k); };
    return s;
}

namespace detail {

inline void check_exponent(double p, const char* name)
{
    if (!(p > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
}

inline double kahan_pow_sum(const std::vector<double>& v, double p)
{
    detail::KahanSum s;
    if (p == 1.0) {
        for (double x : v) s.add(x);
    } else if (p == 2.0) {
        for (double x : v) s.add(x * x);
    } else {
        for (double x : v) s.add(std::pow(x, p));
    }
    return s.value();
}

} // namespace detail

// (h * sum |f|^p)^(1/p); max |f| for p = inf. Quasi-norm for p < 1.
inline double lp_norm(const GridFunction& f, double p)
{
    if (std::isinf(p)) return max_abs(f);
    detail::check_exponent(p, "lp_norm: p");
    detail::KahanSum s;
    if (p == 1.0) {
        for (const auto& v : f.values) s.add(std::abs(v));
    } else if (p == 2.0) {
        for (const auto& v : f.values) s.add(std::norm(v));
    } else {
        for (const auto& v : f.values) s.add(std::pow(std::abs(v), p));
    }
    return std::pow(f.grid.spacing * s.value(), 1.0 / p);
}

// ||{f_k}||_{L^p(l^q)}: pointwise l^q across levels, then L^p in space.
inline double mixed_norm(const LevelSource& src, double p, double q)
{
    if (src.levels.empty()) throw std::invalid_argument("mixed_norm: empty family");
    if (!std::isinf(q)) detail::check_exponent(q, "mixed_norm: q");
    if (!std::isinf(p)) detail::check_exponent(p, "mixed_norm: p");

    const std::size_t n = src.grid.samples;
    std::vector<double> acc(n, 0.0);
    for (int k : src.levels) {
        const GridFunction fk = src.make(k);
        if (!(fk.grid == src.grid)) throw std::invalid_argument("mixed_norm: level grid mismatch");
        if (std::isinf(q)) {
            for (std::size_t i = 0; i < n; ++i) acc[i] = std::max(acc[i], std::abs(fk.values[i]));
        } else if (q == 2.0) {
            for (std::size_t i = 0; i < n; ++i) acc[i] += std::norm(fk.values[i]);
        } else if (q == 1.0) {
            for (std::size_t i = 0; i < n; ++i) acc[i] += std::abs(fk.values[i]);
        } else {
            for (std::size_t i = 0; i < n; ++i) acc[i] += std::pow(std::abs(fk.values[i]), q);
        }
    }
    // acc holds the q-th power of the pointwise l^q norm (or the sup)
    const double qq = std::isinf(q) ? 1.0 : q;
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : acc) m = std::max(m, v);
        return std::pow(m, 1.0 / qq);
    }
    detail::KahanSum s;
    const double e = p / qq;
    if (e == 1.0) {
        for (double v : acc) s.add(v);
    } else if (e == 2.0) {
        for (double v : acc) s.add(v * v);
    } else {
        for (double v : acc) s.add(std::pow(v, e));
    }
    return std::pow(src.grid.spacing * s.value(), 1.0 / p);
}

inline double mixed_norm(const LevelFamily& f, double p, double q)
{
    return mixed_norm(as_source(f), p, q);
}

// Exact on the grid: with |f| sorted descending, sup_alpha alpha*|{|f|>alpha}|
// is attained at a sample value, so the norm is max_i v_i * (i*h).
inline double weak_l1_norm(const GridFunction& f)
{
    std::vector<double> v(f.values.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::abs(f.values[i]);
    std::sort(v.begin(), v.end(), std::greater<double>());
    double best = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        best = std::max(best, v[i] * (static_cast<double>(i + 1) * f.grid.spacing));
    return best;
}

namespace detail {

// Core of the level-restricted cube functional: for every x the sup over
// dyadic cubes P containing x of (|P|^-1 int_P sum_{k >= s(P)} |f_k|^q)
// where s(P) is the side exponent of P (2^k l(P) >= 1 iff k >= s). Levels
// stream in descending order; returns the q-th power of the functional.
inline std::vector<double> sharp_q1_pow(const LevelSource& src, double q)
{
    const Grid& g = src.grid;
    const std::size_t n = g.samples;
    const int s_lo = -g.length_exp;
    const int s_hi = g.samples_exp - g.length_exp;

    std::vector<int> levels = src.levels;
    std::sort(levels.begin(), levels.end(), std::greater<int>());

    std::vector<double> running(n, 0.0);
    std::vector<double> best(n, 0.0);
    std::size_t next = 0;

    auto add_level = [&](int k) {
        const GridFunction fk = src.make(k);
        if (q == 2.0) {
            for (std::size_t i = 0; i < n; ++i) running[i] += std::norm(fk.values[i]);
        } else if (q == 1.0) {
            for (std::size_t i = 0; i < n; ++i) running[i] += std::abs(fk.values[i]);
        } else {
            for (std::size_t i = 0; i < n; ++i) running[i] += std::pow(std::abs(fk.values[i]), q);
        }
    };

    // levels above the finest cube participate for every cube
    while (next < levels.size() && levels[next] > s_hi) add_level(levels[next++]);

    for (int s = s_hi; s >= s_lo; --s) {
        while (next < levels.size() && levels[next] == s) add_level(levels[next++]);
        const auto p = prefix_sums(running);
        const std::size_t w = cube_width(g, s);
        const std::size_t ncubes = cube_count(g, s);
        const double scale = g.spacing * std::ldexp(1.0, s);  // h / side
        for (std::size_t c = 0; c < ncubes; ++c) {
            const double avg = (p[(c + 1) * w] - p[c * w]) * scale;
            for (std::size_t i = c * w; i < (c + 1) * w; ++i)
                best[i] = std::max(best[i], avg);
        }
    }
    return best;
}

} // namespace detail

// M^{#,(1)}_q of a family, as a grid function.
inline GridFunction sharp_q1(const LevelSource& src, double q)
{
    if (std::isinf(q)) throw std::invalid_argument("sharp_q1: q must be finite");
    detail::check_exponent(q, "sharp_q1: q");
    if (src.levels.empty()) throw std::invalid_argument("sharp_q1: empty family");
    const auto pow_vals = detail::sharp_q1_pow(src, q);
    GridFunction out(src.grid);
    const double inv_q = 1.0 / q;
    for (std::size_t i = 0; i < pow_vals.size(); ++i) out.values[i] = std::pow(pow_vals[i], inv_q);
    return out;
}

inline GridFunction sharp_q1(const LevelFamily& f, double q) { return sharp_q1(as_source(f), q); }

// sup_P of the level-restricted cube average: equals max_x sharp_q1 by
// construction (same cube scan).
inline double carleson_norm(const LevelSource& src, double q)
{
    if (std::isinf(q)) throw std::invalid_argument("carleson_norm: q must be finite");
    detail::check_exponent(q, "carleson_norm: q");
    if (src.levels.empty()) throw std::invalid_argument("carleson_norm: empty family");
    const auto pow_vals = detail::sharp_q1_pow(src, q);
    double m = 0.0;
    for (double v : pow_vals) m = std::max(m, v);
    return std::pow(m, 1.0 / q);
}

inline double carleson_norm(const LevelFamily& f, double q) { return carleson_norm(as_source(f), q); }

// ||f||_{H^p} = || sup_k |phi_k * f| ||_{L^p} over the given level window.
inline double hardy_norm(const GridFunction& f, double p, int k_min, int k_max)
{
    if (k_max < k_min) throw std::invalid_argument("hardy_norm: empty level range");
    const Grid& g = f.grid;
    const Spectrum base = to_spectrum(f);
    std::vector<double> acc(g.samples, 0.0);
    for (int k = k_min; k <= k_max; ++k) {
        Spectrum s = base;
        for (std::size_t i = 0; i < s.coeff.size(); ++i)
            s.coeff[i] *= filter_transfer(FilterKind::Phi, k, s.freq_at(i));
        const GridFunction conv = from_spectrum(s);
        for (std::size_t i = 0; i < g.samples; ++i)
            acc[i] = std::max(acc[i], std::abs(conv.values[i]));
    }
    GridFunction sup(g);
    for (std::size_t i = 0; i < g.samples; ++i) sup.values[i] = acc[i];
    return lp_norm(sup, p);
}

// M^# f: sup over dyadic cubes containing x of the mean absolute deviation
// from the cube mean (c_Q = mean; within a factor 2 of the inf over c_Q).
inline GridFunction sharp_maximal(const GridFunction& f)
{
    const Grid& g = f.grid;
    const std::size_t n = g.samples;
    std::vector<double> best(n, 0.0);

    for (int s = -g.length_exp; s <= g.samples_exp - g.length_exp; ++s) {
        const std::size_t w = detail::cube_width(g, s);
        const std::size_t ncubes = detail::cube_count(g, s);
        const double inv_w = 1.0 / static_cast<double>(w);
        for (std::size_t c = 0; c < ncubes; ++c) {
            cplx mean{0.0, 0.0};
            for (std::size_t i = c * w; i < (c + 1) * w; ++i) mean += f.values[i];
            mean *= inv_w;
            double dev = 0.0;
            for (std::size_t i = c * w; i < (c + 1) * w; ++i) dev += std::abs(f.values[i] - mean);
            dev *= inv_w;
            for (std::size_t i = c * w; i < (c + 1) * w; ++i) best[i] = std::max(best[i], dev);
        }
    }
    GridFunction out(g);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = best[i];
    return out;
}

// M^{#,(2)}_q: sup over cubes of the double average of |g_k(z)^q - g_k(u)^q|
// summed over levels with 2^k l(P) < 1. The double average over the product
// measure reduces, per cube and level, to a sorted-order identity:
// (1/n^2) sum_{i,j} |v_i - v_j| = (2/n^2) sum_i v_(i) (2i - n + 1).
inline GridFunction sharp_q2(const LevelFamily& fam, double q)
{
    if (std::isinf(q)) throw std::invalid_argument("sharp_q2: q must be finite");
    detail::check_exponent(q, "sharp_q2: q");
    const Grid& g = fam.grid;
    const std::size_t n = g.samples;

    // per level: the q-th powers |g_k|^q
    std::vector<std::vector<double>> pw(static_cast<std::size_t>(fam.level_count()));
    for (int k = fam.k_min; k <= fam.k_max; ++k) {
        auto& v = pw[static_cast<std::size_t>(k - fam.k_min)];
        v.resize(n);
        const auto& fk = fam.at_level(k);
        for (std::size_t i = 0; i < n; ++i) v[i] = std::pow(std::abs(fk.values[i]), q);
    }

    std::vector<double> best(n, 0.0);
    std::vector<double> cube_acc;
    std::vector<double> scratch;
    for (int s = -g.length_exp; s <= g.samples_exp - g.length_exp; ++s) {
        const std::size_t w = detail::cube_width(g, s);
        const std::size_t ncubes = detail::cube_count(g, s);
        cube_acc.assign(ncubes, 0.0);
        bool any = false;
        for (int k = fam.k_min; k <= fam.k_max; ++k) {
            if (!(k < s)) continue;  // only levels with 2^k l(P) < 1
            any = true;
            const auto& v = pw[static_cast<std::size_t>(k - fam.k_min)];
            const double inv_n2 = 1.0 / (static_cast<double>(w) * static_cast<double>(w));
            for (std::size_t c = 0; c < ncubes; ++c) {
                scratch.assign(v.begin() + static_cast<std::ptrdiff_t>(c * w),
                               v.begin() + static_cast<std::ptrdiff_t>((c + 1) * w));
                std::sort(scratch.begin(), scratch.end());
                double d = 0.0;
                for (std::size_t i = 0; i < w; ++i)
                    d += scratch[i] * (2.0 * static_cast<double>(i) - static_cast<double>(w) + 1.0);
                cube_acc[c] += 2.0 * d * inv_n2;
            }
        }
        if (!any) continue;
        for (std::size_t c = 0; c < ncubes; ++c) {
            for (std::size_t i = c * w; i < (c + 1) * w; ++i)
                best[i] = std::max(best[i], cube_acc[c]);
        }
    }

    GridFunction out(g);
    const double inv_q = 1.0 / q;
    for (std::size_t i = 0; i < n; ++i) out.values[i] = std::pow(best[i], inv_q);
    return out;
}

struct NormReport {
    double value = 0.0;
    MixedNormSpec spec;
    double grid_length = 0.0;
    std::size_t grid_samples = 0;
    int k_min = 0;
    int k_max = -1;
    int truncation_side_exp = 0;  // coarsest cube level used (root = -a)
};

} // namespace shiftlab
