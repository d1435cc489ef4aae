#pragma once

// Band-limited generators: the Littlewood-Paley filters phi_k, psi_k and the
// wide three-term variant psi~_k, plus the nonnegative bump eta used by the
// extremal families. Everything is built in frequency from one smooth cutoff
// profile evaluated in closed form at the discrete frequencies.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>

#include "shiftlab/grid.hpp"

namespace shiftlab {

enum class FilterKind { Phi, Psi, PsiTilde };

namespace detail {

inline double cutoff_core(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

} // namespace detail

// Smooth profile with phi_hat = 1 on [-1,1] and 0 outside (-2,2); the
// transition is the standard exp(-1/s) partition of unity.
inline double phi_hat_profile(double s)
{
    s = std::fabs(s);
    if (s <= 1.0) return 1.0;
    if (s >= 2.0) return 0.0;
    const double a = detail::cutoff_core(2.0 - s);
    const double b = detail::cutoff_core(s - 1.0);
    return a / (a + b);
}

inline double psi_hat_profile(double s)
{
    return phi_hat_profile(s) - phi_hat_profile(2.0 * s);
}

// psi~ = 2^-1 psi(2^-1 .) + psi + 2 psi(2 .); its transform equals 1 on the
// two-octave annulus 1/2 <= |s| <= 2.
inline double psi_tilde_hat_profile(double s)
{
    return psi_hat_profile(2.0 * s) + psi_hat_profile(s) + psi_hat_profile(0.5 * s);
}

// Transfer function of the level-k filter at frequency xi.
inline double filter_transfer(FilterKind kind, int k, double xi)
{
    const double s = std::ldexp(xi, -k);  // xi / 2^k
    switch (kind) {
        case FilterKind::Phi: return phi_hat_profile(s);
        case FilterKind::Psi: return psi_hat_profile(s);
        case FilterKind::PsiTilde: return psi_tilde_hat_profile(s);
    }
    return 0.0;
}

// Materializes phi_k, psi_k or psi~_k as grid samples. The widest support
// (psi~_k reaches 2^{k+2}) must sit strictly inside Nyquist.
inline GridFunction make_filter(const Grid& grid, FilterKind kind, int k)
{
    const double widest = std::ldexp(1.0, k + 2);
    if (!(widest < grid.nyquist())) {
        std::ostringstream os;
        os << "make_filter: level " << k << " needs 2^(k+2) = " << widest
           << " < Nyquist = " << grid.nyquist() << "; increase N";
        throw std::invalid_argument(os.str());
    }
    Spectrum s;
    s.grid = grid;
    s.coeff.assign(grid.samples, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < grid.samples; ++i)
        s.coeff[i] = filter_transfer(kind, k, s.freq_at(i));
    const double hi = (kind == FilterKind::PsiTilde) ? std::ldexp(1.0, k + 2) : std::ldexp(1.0, k + 1);
    return from_spectrum(s, Band{-hi, hi});
}

struct EtaResult {
    GridFunction eta;        // nonnegative, band in [-W, W], eta(0) = 1
    GridFunction generator;  // real g with eta = g^2, band in [-W/2, W/2]
    double floor_value = 0.0;    // attained min of eta on |x| <= R
    double floor_radius = 0.0;   // R
    double halfwidth = 0.0;      // W
};

// eta = g^2 where g_hat is a smooth even bump supported in [-W/2, W/2].
// Nonnegative by construction, with a positive floor on |x| <= R as long as
// R stays inside g's main lobe.
inline EtaResult make_eta(const Grid& grid, double freq_halfwidth, double floor_radius)
{
    const double W = freq_halfwidth;
    const double R = floor_radius;
    if (!(W >= 2.0 / grid.length))
        throw std::invalid_argument("make_eta: W must be >= 2/L so the bump holds interior frequencies");
    if (!(R >= grid.spacing))
        throw std::invalid_argument("make_eta: R must be >= h");
    if (!(W < grid.nyquist()))
        throw std::invalid_argument("make_eta: W exceeds Nyquist");

    Spectrum gh;
    gh.grid = grid;
    gh.coeff.assign(grid.samples, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < grid.samples; ++i) {
        const double xi = gh.freq_at(i);
        const double u = 2.0 * xi / W;
        if (std::fabs(u) < 1.0) {
            const double arg = 1.0 - u * u;
            gh.coeff[i] = std::exp(-1.0 / arg);
        }
    }
    GridFunction g = from_spectrum(gh, Band{-W / 2.0, W / 2.0});

    // normalize so eta(0) = 1
    const double g0 = g.values[0].real();
    for (auto& v : g.values) v /= g0;

    // the floor fails where g first changes sign
    double attainable = grid.length / 2.0;
    for (std::size_t i = 1; i <= grid.samples / 2; ++i) {
        if (g.values[i].real() <= 0.0) {
            attainable = grid.x_of(i - 1);
            break;
        }
    }
    if (R > attainable) {
        std::ostringstream os;
        os << "make_eta: floor radius R = " << R << " exceeds the attainable radius "
           << attainable << " for W = " << W;
        throw std::invalid_argument(os.str());
    }

    EtaResult out;
    out.generator = g;
    out.eta = GridFunction(grid);
    out.eta.band = Band{-W, W};
    for (std::size_t i = 0; i < grid.samples; ++i)
        out.eta.values[i] = std::norm(g.values[i]);

    double c = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.samples; ++i) {
        if (grid.torus_dist(grid.x_of(i)) <= R) c = std::min(c, out.eta.values[i].real());
    }
    out.floor_value = c;
    out.floor_radius = R;
    out.halfwidth = W;
    return out;
}

} // namespace shiftlab
