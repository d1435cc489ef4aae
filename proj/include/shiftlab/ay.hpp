#pragma once

// Numerical estimate of the Hormander-type constant
//   A_y = sup_w int_{|x|>2|w|} sup_j |Lambda^y_{j,sigma}(x-w) - Lambda^y_{j,sigma}(x)| dx.
//
// The kernels are evaluated in closed form on the line; the integral is a
// midpoint quadrature over a multi-scale point set that places a dense panel
// around every kernel peak 2^-j y (and its w-shifted copy) plus a symmetric
// log backbone. The panel set depends only on (y, w, grid), never on the
// requested j range, so enlarging the j range or the w sample set can only
// increase the estimate. The result is a lower estimate of the true sup:
// finitely many w, truncated domain [-L/2, L/2], truncated j range.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "shiftlab/grid.hpp"

namespace shiftlab {

struct AyEstimate {
    double value = 0.0;
    double best_w = 0.0;
    int j_lo = 0;
    int j_hi = 0;
    std::size_t w_count = 0;
    std::vector<std::string> warnings;
};

namespace detail {

inline double lambda_line(double x, int j, double sigma, double y)
{
    const double u = std::ldexp(x, j) - y;
    const double b = 1.0 + std::fabs(u);
    if (sigma == 2.0) return std::ldexp(1.0, j) / (b * b);
    return std::ldexp(1.0, j) * std::pow(b, -sigma);
}

// quadrature nodes for one (y, w): peak panels for every j with a peak in
// range, both for Lambda(.) and Lambda(. - w), plus a log backbone
inline std::vector<double> ay_nodes(const Grid& g, double y, double w)
{
    const double half = g.length / 2.0;
    std::vector<double> xs;
    xs.reserve(1 << 15);

    auto push_sym = [&xs, half](double x) {
        if (std::fabs(x) <= half) xs.push_back(x);
    };

    // log backbone from near the excluded ball out to the domain edge
    {
        const double lo = std::max(2.0 * w * (1.0 + 1e-9), g.spacing / 16.0);
        if (lo < half) {
            const int per_side = 1024;
            const double ratio = std::log(half / lo) / per_side;
            for (int i = 0; i <= per_side; ++i) {
                const double r = lo * std::exp(ratio * i);
                push_sym(r);
                push_sym(-r);
            }
        }
    }

    // dense panels around every representable peak location 2^-j y and its
    // w-shift; the j window here derives from the grid scales only
    for (int j = -(g.length_exp + 2); j <= 62; ++j) {
        const double width = std::ldexp(1.0, -j);
        const double peak = std::ldexp(y, -j);
        if (std::fabs(peak) > g.length * 2.0 && std::fabs(peak) - std::fabs(w) > half + 16.0 * width) continue;
        if (std::fabs(peak) < g.spacing / 64.0) break;  // peaks collapsed to the origin
        for (double center : {peak, peak + w}) {
            const double lo = center - 8.0 * width;
            const double step = width / 16.0;
            for (int i = 0; i <= 256; ++i) push_sym(lo + step * i);
        }
    }

    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

} // namespace detail

inline AyEstimate estimate_ay(double y, double sigma, int j_lo, int j_hi,
                              const std::vector<double>& w_samples, const Grid& grid)
{
    if (!(sigma > 1.0)) throw std::invalid_argument("estimate_ay: sigma must exceed 1");
    if (w_samples.empty()) throw std::invalid_argument("estimate_ay: w_samples must be nonempty");
    if (j_hi < j_lo) throw std::invalid_argument("estimate_ay: empty j range");

    AyEstimate est;
    est.j_lo = j_lo;
    est.j_hi = j_hi;
    est.w_count = w_samples.size();

    for (double w : w_samples) {
        if (!(w > 0.0)) continue;
        const auto xs = detail::ay_nodes(grid, y, w);
        if (xs.size() < 2) continue;
        detail::KahanSum integral;
        for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
            const double mid = 0.5 * (xs[i] + xs[i + 1]);
            if (!(std::fabs(mid) > 2.0 * w)) continue;
            const double dx = xs[i + 1] - xs[i];
            double sup = 0.0;
            for (int j = j_lo; j <= j_hi; ++j) {
                const double d = std::fabs(detail::lambda_line(mid - w, j, sigma, y) -
                                           detail::lambda_line(mid, j, sigma, y));
                sup = std::max(sup, d);
            }
            integral.add(sup * dx);
        }
        if (integral.value() > est.value) {
            est.value = integral.value();
            est.best_w = w;
        }
    }

    if (est.best_w > 0.0) {
        const double ey = std::exp(1.0) + std::fabs(y);
        const double lo_cover = std::ldexp(est.best_w, j_lo);
        const double hi_cover = std::ldexp(est.best_w, j_hi);
        if (lo_cover > 0.25 || hi_cover < 4.0 * ey)
            est.warnings.push_back("j range does not cover the full middle regime at the maximizing w");
    }
    return est;
}

// default w sampling: log-spaced over [h, L/4]
inline std::vector<double> log_spaced_w(const Grid& g, int count)
{
    std::vector<double> w(static_cast<std::size_t>(count));
    const double lo = g.spacing;
    const double hi = g.length / 4.0;
    for (int i = 0; i < count; ++i) {
        const double t = (count == 1) ? 0.0 : static_cast<double>(i) / (count - 1);
        w[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, t);
    }
    return w;
}

} // namespace shiftlab
