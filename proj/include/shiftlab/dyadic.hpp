#pragma once

// Dyadic cubes on the torus and the block/prefix summation helpers shared by
// the averaging operators and the cube-indexed norms.
//
// A cube at side exponent s has side 2^-s; admissible s runs from -a (the
// whole torus, side L = 2^a) down to m-a (a single sample, side h). Cube
// offsets at side exponent s live in [0, L*2^s).

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "shiftlab/grid.hpp"

namespace shiftlab {

struct DyadicCube {
    int side_exp = 0;       // s; side length is 2^-s
    std::int64_t offset = 0;

    double side() const { return std::ldexp(1.0, -side_exp); }
    double measure() const { return side(); }
    double left(const Grid&) const { return static_cast<double>(offset) * side(); }
};

namespace detail {

inline void check_side_exp(const Grid& g, int s)
{
    if (s < -g.length_exp || s > g.samples_exp - g.length_exp)
        throw std::invalid_argument("dyadic cube side exponent out of range for grid");
}

// number of cubes tiling the torus at side exponent s
inline std::size_t cube_count(const Grid& g, int s)
{
    return std::size_t{1} << (g.length_exp + s);
}

// samples per cube at side exponent s
inline std::size_t cube_width(const Grid& g, int s)
{
    return std::size_t{1} << (g.samples_exp - g.length_exp - s);
}

// Pairwise (tree) block sums: out[c] = sum of a[c*w .. c*w+w). Bit-exact
// against a recursive left+right evaluation of the cube tree.
inline std::vector<double> block_sums(const std::vector<double>& a, std::size_t w)
{
    std::vector<double> cur = a;
    for (std::size_t width = 1; width < w; width <<= 1) {
        const std::size_t half = cur.size() / 2;
        std::vector<double> next(half);
        for (std::size_t i = 0; i < half; ++i) next[i] = cur[2 * i] + cur[2 * i + 1];
        cur = std::move(next);
    }
    return cur;
}

// Kahan prefix sums, P[0] = 0, P[i] = sum of a[0..i).
inline std::vector<double> prefix_sums(const std::vector<double>& a)
{
    std::vector<double> p(a.size() + 1);
    KahanSum s;
    p[0] = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s.add(a[i]);
        p[i + 1] = s.value();
    }
    return p;
}

// cyclic window sum over [start, start+w) mod N from prefix sums
inline double window_sum(const std::vector<double>& p, std::size_t n, std::size_t start, std::size_t w)
{
    start %= n;
    if (start + w <= n) return p[start + w] - p[start];
    return (p[n] - p[start]) + p[start + w - n];
}

} // namespace detail
} // namespace shiftlab
