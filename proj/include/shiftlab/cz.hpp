#pragma once

// Vector-valued Calderon-Zygmund decomposition: a stopping time down the
// dyadic tree splits a doubly indexed family {f_{j,k}} at level gamma*alpha
// of its pointwise l^q(l^1) norm into a bounded good part and mean-zero,
// cube-supported bad pieces.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "shiftlab/dyadic.hpp"
#include "shiftlab/grid.hpp"

namespace shiftlab {

struct DoubleFamily {
    Grid grid;
    std::vector<int> j_labels;
    std::vector<int> k_labels;
    std::vector<std::vector<GridFunction>> functions;  // functions[jj][kk]

    std::size_t j_count() const { return j_labels.size(); }
    std::size_t k_count() const { return k_labels.size(); }
};

// pointwise (sum_k (sum_j |f_{j,k}(x)|)^q)^(1/q)
inline std::vector<double> lq_l1_pointwise(const DoubleFamily& f, double q)
{
    const std::size_t n = f.grid.samples;
    std::vector<double> out(n, 0.0);
    for (std::size_t kk = 0; kk < f.k_count(); ++kk) {
        std::vector<double> inner(n, 0.0);
        for (std::size_t jj = 0; jj < f.j_count(); ++jj) {
            const auto& v = f.functions[jj][kk].values;
            for (std::size_t i = 0; i < n; ++i) inner[i] += std::abs(v[i]);
        }
        if (q == 2.0) {
            for (std::size_t i = 0; i < n; ++i) out[i] += inner[i] * inner[i];
        } else {
            for (std::size_t i = 0; i < n; ++i) out[i] += std::pow(inner[i], q);
        }
    }
    const double inv_q = 1.0 / q;
    for (auto& v : out) v = std::pow(v, inv_q);
    return out;
}

struct CzBadPiece {
    DyadicCube cube;
    std::size_t first_sample = 0;
    std::size_t sample_count = 0;
    std::vector<std::vector<cplx>> means;  // means[jj][kk] of f over the cube
};

struct CzDecomposition {
    double alpha = 0.0;
    double gamma = 0.0;
    double normalization = 1.0;  // input was divided by this before decomposing
    bool degenerate_root = false;
    DoubleFamily good;
    std::vector<CzBadPiece> bad;

    // b^l_{j,k} = (f_{j,k} - mean) chi_{Q_l} on the normalized input
    GridFunction materialize_bad(const DoubleFamily& normalized_input,
                                 std::size_t l, std::size_t jj, std::size_t kk) const
    {
        const auto& piece = bad.at(l);
        GridFunction b(normalized_input.grid);
        const auto& src = normalized_input.functions[jj][kk].values;
        for (std::size_t i = piece.first_sample; i < piece.first_sample + piece.sample_count; ++i)
            b.values[i] = src[i] - piece.means[jj][kk];
        return b;
    }
};

// Normalized copy of the family (pointwise norm integrates to 1); the scale
// factor is returned through `factor`.
inline DoubleFamily normalize_family(const DoubleFamily& f, double q, double& factor)
{
    const auto a = lq_l1_pointwise(f, q);
    detail::KahanSum s;
    for (double v : a) s.add(v);
    const double mass = f.grid.spacing * s.value();
    if (!(mass > 0.0)) throw std::invalid_argument("cz_decompose: family has zero mass");
    DoubleFamily out = f;
    const double inv = 1.0 / mass;
    for (auto& row : out.functions)
        for (auto& fn : row)
            for (auto& v : fn.values) v *= inv;
    factor = mass;
    return out;
}

inline CzDecomposition cz_decompose(const DoubleFamily& family, double q, double alpha, double gamma)
{
    if (!(q > 1.0) || std::isinf(q)) throw std::invalid_argument("cz_decompose: q must lie in (1, inf)");
    if (!(alpha > 0.0)) throw std::invalid_argument("cz_decompose: alpha must be positive");
    if (!(gamma > 0.0)) throw std::invalid_argument("cz_decompose: gamma must be positive");
    if (family.j_count() == 0 || family.k_count() == 0)
        throw std::invalid_argument("cz_decompose: empty family");

    CzDecomposition dec;
    dec.alpha = alpha;
    dec.gamma = gamma;
    DoubleFamily norm = normalize_family(family, q, dec.normalization);
    const Grid& g = norm.grid;
    const std::size_t n = g.samples;
    const double threshold = gamma * alpha;

    const auto a = lq_l1_pointwise(norm, q);
    const auto prefix = detail::prefix_sums(a);

    const int s_root = -g.length_exp;
    const int s_leaf = g.samples_exp - g.length_exp;

    // avg over cube = h * (cube sample sum) / side
    auto cube_avg = [&](int s, std::size_t c) {
        const std::size_t w = detail::cube_width(g, s);
        return (prefix[(c + 1) * w] - prefix[c * w]) * g.spacing * std::ldexp(1.0, s);
    };

    std::vector<DyadicCube> selected;
    if (cube_avg(s_root, 0) > threshold) {
        dec.degenerate_root = true;
        selected.push_back(DyadicCube{s_root, 0});
    } else {
        // maximal cubes with average above threshold: descend only through
        // cubes at or below it
        std::vector<std::pair<int, std::size_t>> stack{{s_root, 0}};
        while (!stack.empty()) {
            const auto [s, c] = stack.back();
            stack.pop_back();
            if (s == s_leaf) continue;
            for (std::size_t child = 2 * c; child <= 2 * c + 1; ++child) {
                if (cube_avg(s + 1, child) > threshold)
                    selected.push_back(DyadicCube{s + 1, static_cast<std::int64_t>(child)});
                else
                    stack.push_back({s + 1, child});
            }
        }
    }

    dec.good = norm;
    for (const auto& cube : selected) {
        CzBadPiece piece;
        piece.cube = cube;
        const std::size_t w = detail::cube_width(g, cube.side_exp);
        piece.first_sample = static_cast<std::size_t>(cube.offset) * w;
        piece.sample_count = w;
        piece.means.assign(norm.j_count(), std::vector<cplx>(norm.k_count()));
        const double inv_w = 1.0 / static_cast<double>(w);
        for (std::size_t jj = 0; jj < norm.j_count(); ++jj) {
            for (std::size_t kk = 0; kk < norm.k_count(); ++kk) {
                cplx mean{0.0, 0.0};
                const auto& src = norm.functions[jj][kk].values;
                for (std::size_t i = piece.first_sample; i < piece.first_sample + w; ++i) mean += src[i];
                mean *= inv_w;
                piece.means[jj][kk] = mean;
                auto& dst = dec.good.functions[jj][kk].values;
                for (std::size_t i = piece.first_sample; i < piece.first_sample + w; ++i) dst[i] = mean;
            }
        }
        dec.bad.push_back(std::move(piece));
    }
    (void)n;
    return dec;
}

} // namespace shiftlab
