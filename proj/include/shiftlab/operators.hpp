#pragma once

// The shifted operators: dyadic averages N^k_y, the shifted dyadic maximal
// function M^y_t, the generalized Peetre maximal function M^t_{sigma,2^k,y},
// the kernels Lambda^y_{j,sigma}, shifted Littlewood-Paley convolutions, and
// the classical M_t baseline.
//
// Shift handling: window-type operators snap the shift 2^-k y to the nearest
// grid multiple (prefix-sum windows need integer offsets); convolution-type
// operators translate spectrally, which is exact for band-limited inputs.
// Peetre kernels snap their offset the same way, which makes the shift
// covariance M^t_{sigma,2^k,y} f = translate(M^t_{sigma,2^k,0} f, 2^-k y)
// hold on the grid to rounding error.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "shiftlab/dyadic.hpp"
#include "shiftlab/filters.hpp"
#include "shiftlab/grid.hpp"

namespace shiftlab {

inline constexpr double t_infinity = std::numeric_limits<double>::infinity();

struct ShiftedOpParams {
    double sigma = 2.0;
    double t = 1.0;       // in (0, inf]; t_infinity selects the sup form
    int k = 0;            // dyadic level
    double y = 0.0;       // shift factor
    int wraps = 0;        // periodization count V; 0 = auto per tail bound
};

namespace detail {

inline double snap_to_grid(const Grid& g, double s)
{
    return std::round(s / g.spacing) * g.spacing;
}

// Spec default: smallest V with sum_{|v|>V} (2^j v L)^(-p) < 1e-10 * mass.
inline int auto_wraps(double p, double scale_times_length)
{
    const double base = std::pow(scale_times_length, -p) * 1e10;
    const double v = std::pow(base, 1.0 / (p - 1.0));
    const int vi = static_cast<int>(std::ceil(v));
    return std::clamp(vi, 1, 4096);
}

// Periodized power kernel sum_nu 2^j (1 + |2^j (z + nu L) - yk|)^(-p) with
// the wrap range centered at the peak and the out-of-range wraps replaced by
// their midpoint-rule integral; without that correction a unit torus with
// p near 1 would need ~1e10 explicit wraps to meet the mass examples.
inline std::vector<double> power_kernel_samples(const Grid& g, int j, double p, double yk, int wraps)
{
    const double scale = std::ldexp(1.0, j);          // 2^j
    const double stride = scale * g.length;           // wrap stride in kernel units
    const int V = (wraps > 0) ? wraps : auto_wraps(p, stride);

    const bool p2 = (p == 2.0);
    const bool p4 = (p == 4.0);
    auto decay = [p, p2, p4](double b) {
        if (p2) return 1.0 / (b * b);
        if (p4) {
            const double b2 = b * b;
            return 1.0 / (b2 * b2);
        }
        return std::pow(b, -p);
    };

    std::vector<double> out(g.samples);
    const double tail_pow = p - 1.0;
    for (std::size_t i = 0; i < g.samples; ++i) {
        const double u0 = scale * g.x_of(i) - yk;
        const double center = -u0 / stride;
        const auto nu0 = static_cast<std::int64_t>(std::llround(center));
        double s = 0.0;
        for (std::int64_t nu = nu0 - V; nu <= nu0 + V; ++nu) {
            const double u = u0 + static_cast<double>(nu) * stride;
            s += decay(1.0 + std::fabs(u));
        }
        const double u_hi = u0 + (static_cast<double>(nu0 + V) + 0.5) * stride;
        const double u_lo = u0 + (static_cast<double>(nu0 - V) - 0.5) * stride;
        s += std::pow(1.0 + std::fabs(u_hi), -tail_pow) / (tail_pow * stride);
        s += std::pow(1.0 + std::fabs(u_lo), -tail_pow) / (tail_pow * stride);
        out[i] = scale * s;
    }
    return out;
}

} // namespace detail

// N^k_y f: mean of f over the side-2^-k dyadic cube containing x, shifted by
// 2^-k y (snapped). Constant on each cube; O(N) per level.
inline GridFunction dyadic_average(const GridFunction& f, int k, double y)
{
    const Grid& g = f.grid;
    detail::check_side_exp(g, k);
    const std::size_t w = detail::cube_width(g, k);
    const std::size_t ncubes = detail::cube_count(g, k);
    const double shift = detail::snap_to_grid(g, std::ldexp(y, -k));
    const auto off = static_cast<std::int64_t>(std::llround(shift / g.spacing));
    const auto n = static_cast<std::int64_t>(g.samples);
    const std::size_t o = static_cast<std::size_t>(((off % n) + n) % n);

    GridFunction out(g);
    const double inv_w = 1.0 / static_cast<double>(w);

    if (o == 0) {
        // unshifted windows are tree nodes; pairwise sums keep the pure
        // dyadic maximal function bit-exact against a tree recursion
        std::vector<double> re(g.samples), im(g.samples);
        for (std::size_t i = 0; i < g.samples; ++i) {
            re[i] = f.values[i].real();
            im[i] = f.values[i].imag();
        }
        const auto sre = detail::block_sums(re, w);
        const auto sim = detail::block_sums(im, w);
        for (std::size_t c = 0; c < ncubes; ++c) {
            const cplx avg{sre[c] * inv_w, sim[c] * inv_w};
            for (std::size_t i = c * w; i < (c + 1) * w; ++i) out.values[i] = avg;
        }
        return out;
    }

    std::vector<double> re(g.samples), im(g.samples);
    for (std::size_t i = 0; i < g.samples; ++i) {
        re[i] = f.values[i].real();
        im[i] = f.values[i].imag();
    }
    const auto pre = detail::prefix_sums(re);
    const auto pim = detail::prefix_sums(im);
    for (std::size_t c = 0; c < ncubes; ++c) {
        const std::size_t start = c * w + o;
        const cplx avg{detail::window_sum(pre, g.samples, start, w) * inv_w,
                       detail::window_sum(pim, g.samples, start, w) * inv_w};
        for (std::size_t i = c * w; i < (c + 1) * w; ++i) out.values[i] = avg;
    }
    return out;
}

// M^y_t f = (M^y(|f|^t))^(1/t): pointwise sup of shifted cube averages of
// |f|^t over every admissible level.
inline GridFunction shifted_dyadic_maximal(const GridFunction& f, double y, double t)
{
    if (!(t > 0.0) || !std::isfinite(t))
        throw std::invalid_argument("shifted_dyadic_maximal: t must be finite and positive");
    const Grid& g = f.grid;
    const GridFunction a = abs_pow(f, t);

    std::vector<double> best(g.samples, 0.0);
    for (int s = -g.length_exp; s <= g.samples_exp - g.length_exp; ++s) {
        const GridFunction avg = dyadic_average(a, s, y);
        for (std::size_t i = 0; i < g.samples; ++i)
            best[i] = std::max(best[i], avg.values[i].real());
    }

    GridFunction out(g);
    if (t == 1.0) {
        for (std::size_t i = 0; i < g.samples; ++i) out.values[i] = best[i];
    } else {
        const double inv_t = 1.0 / t;
        for (std::size_t i = 0; i < g.samples; ++i) out.values[i] = std::pow(best[i], inv_t);
    }
    return out;
}

// M^t_{sigma,2^k,y} f. For finite t this is (K (*) |f|^t)^(1/t) with the
// periodized kernel K(z) = 2^k (1 + |2^k z - y|)^(-sigma t); for t = inf it
// is the direct sup over grid points (O(N^2), intended for test-scale grids).
inline GridFunction peetre_shifted(const GridFunction& f, const ShiftedOpParams& p)
{
    const Grid& g = f.grid;
    const double ysnap = detail::snap_to_grid(g, std::ldexp(p.y, -p.k));
    const double yk = std::ldexp(ysnap, p.k);  // snapped shift in kernel units

    if (std::isfinite(p.t)) {
        if (!(p.t > 0.0)) throw std::invalid_argument("peetre_shifted: t must be positive");
        if (!(p.sigma * p.t > 1.0))
            throw std::invalid_argument("peetre_shifted: sigma*t must exceed 1 (divergent kernel mass)");
        const double pw = p.sigma * p.t;
        GridFunction kern(g);
        {
            const auto samples = detail::power_kernel_samples(g, p.k, pw, yk, p.wraps);
            for (std::size_t i = 0; i < g.samples; ++i) kern.values[i] = samples[i];
        }
        const GridFunction a = abs_pow(f, p.t);
        GridFunction conv = convolve(a, kern);
        GridFunction out(g);
        if (p.t == 1.0) {
            for (std::size_t i = 0; i < g.samples; ++i)
                out.values[i] = std::max(0.0, conv.values[i].real());
        } else {
            const double inv_t = 1.0 / p.t;
            for (std::size_t i = 0; i < g.samples; ++i)
                out.values[i] = std::pow(std::max(0.0, conv.values[i].real()), inv_t);
        }
        return out;
    }

    if (!(p.sigma > 0.0)) throw std::invalid_argument("peetre_shifted: sigma must be positive for t = inf");
    const double scale = std::ldexp(1.0, p.k);
    const double stride = scale * g.length;

    // sup over all wraps of a weight decreasing in |u| sits at the nearest
    // integer wrap, so no truncation enters the t = inf path
    std::vector<double> weight(g.samples);
    for (std::size_t d = 0; d < g.samples; ++d) {
        const double u0 = scale * g.x_of(d) - yk;
        const auto nu0 = static_cast<double>(std::llround(-u0 / stride));
        const double u = u0 + nu0 * stride;
        weight[d] = std::pow(1.0 + std::fabs(u), -p.sigma);
    }
    std::vector<double> af(g.samples);
    for (std::size_t i = 0; i < g.samples; ++i) af[i] = std::abs(f.values[i]);

    GridFunction out(g);
    const std::size_t n = g.samples;
    for (std::size_t i = 0; i < n; ++i) {
        double m = 0.0;
        for (std::size_t d = 0; d < n; ++d) {
            const std::size_t src = (i + n - d) % n;
            m = std::max(m, af[src] * weight[d]);
        }
        out.values[i] = m;
    }
    return out;
}

// t = inf Peetre evaluated on a spectrally upsampled copy (zero-padded
// spectrum), for checking that the grid sup is a faithful proxy.
inline GridFunction peetre_shifted_upsampled(const GridFunction& f, const ShiftedOpParams& p, int factor)
{
    if (factor <= 1) return peetre_shifted(f, p);
    if (!detail::is_pow2(static_cast<std::size_t>(factor)))
        throw std::invalid_argument("peetre_shifted_upsampled: factor must be a power of two");
    const Grid fine = make_grid(f.grid.length, f.grid.samples * static_cast<std::size_t>(factor));
    Spectrum s = to_spectrum(f);
    Spectrum up;
    up.grid = fine;
    up.coeff.assign(fine.samples, cplx{0.0, 0.0});
    const auto half = static_cast<std::int64_t>(f.grid.samples / 2);
    for (std::int64_t j = -half; j < half; ++j) up.at_freq_index(j) = s.at_freq_index(j);
    const GridFunction fu = from_spectrum(up, f.band);
    const GridFunction mu = peetre_shifted(fu, p);
    GridFunction out(f.grid);
    for (std::size_t i = 0; i < f.grid.samples; ++i)
        out.values[i] = mu.values[i * static_cast<std::size_t>(factor)];
    return out;
}

// Lambda^y_{j,sigma}(x) = 2^j / (1 + |2^j x - y|)^sigma, periodized.
inline GridFunction lambda_kernel(const Grid& g, int j, double sigma, double y, int wraps = 0)
{
    if (!(sigma > 1.0)) throw std::invalid_argument("lambda_kernel: sigma must exceed 1 (n = 1)");
    const double ysnap = detail::snap_to_grid(g, std::ldexp(y, -j));
    const double yk = std::ldexp(ysnap, j);
    GridFunction out(g);
    const auto samples = detail::power_kernel_samples(g, j, sigma, yk, wraps);
    for (std::size_t i = 0; i < g.samples; ++i) out.values[i] = samples[i];
    return out;
}

inline GridFunction lambda_convolve(const GridFunction& f, int j, double sigma, double y, int wraps = 0)
{
    return convolve(f, lambda_kernel(f.grid, j, sigma, y, wraps));
}

// (phi_k)^y * f and friends: multiply by the filter transfer in frequency,
// then shift by exactly 2^-k y via a spectral phase. Identical to
// translate(convolve(f, filter_k), 2^-k y) wherever the filter itself is
// representable; when it is not, the multiplier restricted to f's band is
// still exact, so a band descriptor inside Nyquist is accepted instead.
inline GridFunction lp_conv_shifted_spectral(const Spectrum& base, std::optional<Band> fband,
                                             FilterKind kind, int k, double y)
{
    const Grid& g = base.grid;
    const double widest = std::ldexp(1.0, k + 2);
    if (!(widest < g.nyquist())) {
        const double nyq = g.nyquist();
        if (!fband || fband->hi > nyq || fband->lo < -nyq) {
            std::ostringstream os;
            os << "lp_conv_shifted: filter level " << k
               << " is not representable at Nyquist " << nyq
               << " and f carries no in-range band descriptor";
            throw std::invalid_argument(os.str());
        }
    }

    const double shift = std::ldexp(y, -k);
    Spectrum s = base;
    const auto sL = static_cast<long double>(shift) / static_cast<long double>(g.length);
    for (std::size_t i = 0; i < s.coeff.size(); ++i) {
        const double transfer = filter_transfer(kind, k, s.freq_at(i));
        if (transfer == 0.0) {
            s.coeff[i] = 0.0;
            continue;
        }
        const auto j = static_cast<long double>(s.freq_index_at(i));
        s.coeff[i] *= transfer * detail::unit_phase(sL * j);
    }

    const double hi = (kind == FilterKind::PsiTilde) ? std::ldexp(1.0, k + 2) : std::ldexp(1.0, k + 1);
    std::optional<Band> band = Band{-hi, hi};
    if (fband) band = Band{std::max(band->lo, fband->lo), std::min(band->hi, fband->hi)};
    if (band->lo > band->hi) band = Band{0.0, 0.0};
    return from_spectrum(s, band);
}

inline GridFunction lp_conv_shifted(const GridFunction& f, FilterKind kind, int k, double y)
{
    return lp_conv_shifted_spectral(to_spectrum(f), f.band, kind, k, y);
}

// Classical M_t restricted to windows of dyadic length at every grid offset.
// Pointwise within a factor 2^(1/t) of the unrestricted maximal function;
// a comparison baseline, not an acceptance target.
inline GridFunction hl_maximal(const GridFunction& f, double t)
{
    if (!(t > 0.0) || !std::isfinite(t))
        throw std::invalid_argument("hl_maximal: t must be finite and positive");
    const Grid& g = f.grid;
    const std::size_t n = g.samples;
    std::vector<double> a(n);
    {
        const GridFunction ap = abs_pow(f, t);
        for (std::size_t i = 0; i < n; ++i) a[i] = ap.values[i].real();
    }
    const auto p = detail::prefix_sums(a);

    std::vector<double> best(n, 0.0);
    for (std::size_t w = 1; w <= n; w <<= 1) {
        // window sums W[s] over [s, s+w); x is covered by starts in (x-w, x]
        std::vector<double> ws(n);
        for (std::size_t s = 0; s < n; ++s) ws[s] = detail::window_sum(p, n, s, w);
        const double inv_w = 1.0 / static_cast<double>(w);

        // sliding max of ws over windows of length w on the doubled array;
        // out[x] = max_{s in [x-w+1, x]} ws[s mod n]
        std::vector<std::size_t> dq(2 * n);
        std::size_t head = 0, tail = 0;
        for (std::size_t idx = 0; idx < 2 * n; ++idx) {
            const double v = ws[idx % n];
            while (tail > head && ws[dq[tail - 1] % n] <= v) --tail;
            dq[tail++] = idx;
            while (dq[head] + w <= idx) ++head;
            if (idx >= w - 1 && idx >= n) {
                const std::size_t x = idx - n;
                best[x] = std::max(best[x], ws[dq[head] % n] * inv_w);
            }
        }
    }

    GridFunction out(g);
    if (t == 1.0) {
        for (std::size_t i = 0; i < n; ++i) out.values[i] = best[i];
    } else {
        const double inv_t = 1.0 / t;
        for (std::size_t i = 0; i < n; ++i) out.values[i] = std::pow(best[i], inv_t);
    }
    return out;
}

} // namespace shiftlab
