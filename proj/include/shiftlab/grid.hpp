#pragma once

// Periodic grid core: a torus of dyadic length L sampled at N = 2^m points,
// complex sample vectors with an optional frequency-band descriptor, and the
// spectral transforms everything else is built on.
//
// Transform convention (forward uses the +i exponent):
//   to_spectrum:    F[j] = h * sum_i f(x_i) exp(+2*pi*i * x_i * j/L)
//   from_spectrum:  f(x_i) = (1/L) * sum_j F[j] exp(-2*pi*i * x_i * j/L)
// Frequencies are xi_j = j/L for integer j in [-N/2, N/2). Spectral energy
// uses the frequency measure 1/L, so Parseval reads
//   h * sum |f|^2 = (1/L) * sum |F|^2.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "shiftlab/fft.hpp"

namespace shiftlab {

struct Grid {
    double length = 1.0;      // L, a power of two >= 1
    std::size_t samples = 1;  // N, a power of two >= 2
    double spacing = 1.0;     // h = L/N, exact in binary
    int length_exp = 0;       // a, L = 2^a
    int samples_exp = 0;      // m, N = 2^m

    double x_of(std::size_t i) const { return static_cast<double>(i) * spacing; }
    double nyquist() const { return static_cast<double>(samples) / (2.0 * length); }

    // distance from x to 0 on the torus
    double torus_dist(double x) const
    {
        double r = std::fmod(x, length);
        if (r < 0) r += length;
        return std::min(r, length - r);
    }

    bool operator==(const Grid& o) const
    {
        return length == o.length && samples == o.samples;
    }
};

namespace detail {

// returns the exponent if v is exactly a power of two, nullopt otherwise
inline std::optional<int> pow2_exponent(double v)
{
    if (!(v > 0.0) || !std::isfinite(v)) return std::nullopt;
    int e = 0;
    const double m = std::frexp(v, &e);
    if (m != 0.5) return std::nullopt;
    return e - 1;
}

} // namespace detail

inline Grid make_grid(double length, std::size_t samples)
{
    const auto a = detail::pow2_exponent(length);
    if (!a) throw std::invalid_argument("make_grid: L must be a power of two, got " + std::to_string(length));
    if (length < 1.0) throw std::invalid_argument("make_grid: L must be >= 1");
    if (!detail::is_pow2(samples) || samples < 2)
        throw std::invalid_argument("make_grid: N must be a power of two >= 2, got " + std::to_string(samples));
    int m = 0;
    for (std::size_t v = samples; v > 1; v >>= 1) ++m;
    if (m < *a)
        throw std::invalid_argument("make_grid: N < L gives sub-unit resolution h > 1 (N must be >= L)");
    Grid g;
    g.length = length;
    g.samples = samples;
    g.spacing = length / static_cast<double>(samples);
    g.length_exp = *a;
    g.samples_exp = m;
    return g;
}

// Closed frequency interval [lo, hi] in cycles per unit length.
struct Band {
    double lo = 0.0;
    double hi = 0.0;
};

struct GridFunction {
    Grid grid;
    std::vector<cplx> values;
    std::optional<Band> band;

    GridFunction() = default;
    explicit GridFunction(const Grid& g) : grid(g), values(g.samples, cplx{0.0, 0.0}) {}
    GridFunction(const Grid& g, std::vector<cplx> v, std::optional<Band> b = std::nullopt)
        : grid(g), values(std::move(v)), band(b)
    {
        if (values.size() != grid.samples)
            throw std::invalid_argument("GridFunction: values length must equal grid.N");
    }

    std::size_t size() const { return values.size(); }
};

// Coefficients in FFT index order: index i holds frequency j = i for
// i < N/2 and j = i - N otherwise.
struct Spectrum {
    Grid grid;
    std::vector<cplx> coeff;

    std::size_t index_of(std::int64_t j) const
    {
        const auto n = static_cast<std::int64_t>(grid.samples);
        std::int64_t r = j % n;
        if (r < 0) r += n;
        return static_cast<std::size_t>(r);
    }
    std::int64_t freq_index_at(std::size_t i) const
    {
        const auto n = static_cast<std::int64_t>(grid.samples);
        auto j = static_cast<std::int64_t>(i);
        return (j < n / 2) ? j : j - n;
    }
    double freq_at(std::size_t i) const
    {
        return static_cast<double>(freq_index_at(i)) / grid.length;
    }
    cplx& at_freq_index(std::int64_t j) { return coeff[index_of(j)]; }
    const cplx& at_freq_index(std::int64_t j) const { return coeff[index_of(j)]; }
};

inline Spectrum to_spectrum(const GridFunction& f)
{
    Spectrum s;
    s.grid = f.grid;
    s.coeff = f.values;
    detail::fft_inplace(s.coeff, +1);
    for (auto& c : s.coeff) c *= f.grid.spacing;
    return s;
}

inline GridFunction from_spectrum(const Spectrum& s, std::optional<Band> band = std::nullopt)
{
    GridFunction f(s.grid);
    f.values = s.coeff;
    detail::fft_inplace(f.values, -1);
    const double scale = 1.0 / s.grid.length;
    for (auto& v : f.values) v *= scale;
    f.band = band;
    return f;
}

// (1/L)-weighted spectral energy, the right-hand side of Parseval.
inline double spectral_energy(const Spectrum& s)
{
    detail::KahanSum sum;
    for (const auto& c : s.coeff) sum.add(std::norm(c));
    return sum.value() / s.grid.length;
}

struct BandCheckResult {
    bool pass = false;
    double leakage = 0.0;
};

// Fraction of spectral energy outside [band.lo, band.hi]; pass iff <= 1e-10.
inline BandCheckResult band_support_check(const GridFunction& f, const Band& band)
{
    const Spectrum s = to_spectrum(f);
    detail::KahanSum in, total;
    for (std::size_t i = 0; i < s.coeff.size(); ++i) {
        const double e = std::norm(s.coeff[i]);
        total.add(e);
        const double xi = s.freq_at(i);
        if (xi >= band.lo && xi <= band.hi) in.add(e);
    }
    BandCheckResult r;
    if (total.value() <= 0.0) {
        r.pass = true;
        r.leakage = 0.0;
        return r;
    }
    r.leakage = std::max(0.0, (total.value() - in.value()) / total.value());
    r.pass = r.leakage <= 1e-10;
    return r;
}

namespace detail {

// exp(2*pi*i*turns) with the fractional part taken in long double; keeps the
// phase accurate for the large frequency*shift products in translate().
inline cplx unit_phase(long double turns)
{
    long double frac = turns - std::floor(turns);
    const long double ang = 2.0L * static_cast<long double>(std::numbers::pi) * frac;
    return {static_cast<double>(std::cos(ang)), static_cast<double>(std::sin(ang))};
}

} // namespace detail

// Pointwise product with exp(2*pi*i*xi0*x); xi0 must be an integer multiple
// of 1/L so the factor is periodic. The spectrum shifts by exactly xi0.
inline GridFunction modulate(const GridFunction& f, double xi0)
{
    const double jreal = xi0 * f.grid.length;
    const auto j0 = static_cast<std::int64_t>(std::llround(jreal));
    if (std::fabs(jreal - static_cast<double>(j0)) > 1e-9 * std::max(1.0, std::fabs(jreal)))
        throw std::invalid_argument("modulate: xi0*L must be an integer (periodicity), got xi0*L = " + std::to_string(jreal));

    std::optional<Band> band;
    if (f.band) {
        band = Band{f.band->lo + xi0, f.band->hi + xi0};
        const double nyq = f.grid.nyquist();
        if (band->hi > nyq || band->lo < -nyq) {
            std::ostringstream os;
            os << "modulate: shifted band [" << band->lo << ", " << band->hi
               << "] exceeds Nyquist " << nyq << "; increase N";
            throw std::invalid_argument(os.str());
        }
    }

    GridFunction out(f.grid);
    out.band = band;
    const auto n = static_cast<std::int64_t>(f.grid.samples);
    std::int64_t jm = j0 % n;
    if (jm < 0) jm += n;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        // i*j0 mod N computed exactly in integers
        const std::int64_t r = (static_cast<std::int64_t>(i) * jm) % n;
        const double ang = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n);
        out.values[i] = f.values[i] * cplx{std::cos(ang), std::sin(ang)};
    }
    return out;
}

// f(. - a). Grid multiples rotate samples exactly; anything else is a
// spectral phase shift, exact for band-limited f.
inline GridFunction translate(const GridFunction& f, double a)
{
    const double r = a / f.grid.spacing;
    const auto k = static_cast<std::int64_t>(std::llround(r));
    if (std::fabs(r - static_cast<double>(k)) <= 1e-12 * std::max(1.0, std::fabs(r))) {
        GridFunction out(f.grid);
        out.band = f.band;
        const auto n = static_cast<std::int64_t>(f.grid.samples);
        std::int64_t s = k % n;
        if (s < 0) s += n;
        for (std::size_t i = 0; i < out.values.size(); ++i) {
            const std::size_t src = static_cast<std::size_t>((static_cast<std::int64_t>(i) - s + n) % n);
            out.values[i] = f.values[src];
        }
        return out;
    }

    Spectrum s = to_spectrum(f);
    const auto aL = static_cast<long double>(a) / static_cast<long double>(f.grid.length);
    for (std::size_t i = 0; i < s.coeff.size(); ++i) {
        const auto j = static_cast<long double>(s.freq_index_at(i));
        s.coeff[i] *= detail::unit_phase(aL * j);
    }
    return from_spectrum(s, f.band);
}

// Periodic convolution h*(f (*) g), the Riemann approximation of
// int f(x-z) g(z) dz. Spectra multiply: F(conv) = F(f) * F(g).
inline GridFunction convolve(const GridFunction& f, const GridFunction& g)
{
    if (!(f.grid == g.grid)) throw std::invalid_argument("convolve: grid mismatch");
    std::vector<cplx> a = f.values;
    std::vector<cplx> b = g.values;
    detail::fft_inplace(a, +1);
    detail::fft_inplace(b, +1);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
    detail::fft_inplace(a, -1);
    const double scale = f.grid.spacing / static_cast<double>(f.grid.samples);
    for (auto& v : a) v *= scale;

    std::optional<Band> band;
    if (f.band && g.band)
        band = Band{std::max(f.band->lo, g.band->lo), std::min(f.band->hi, g.band->hi)};
    else if (f.band)
        band = f.band;
    else if (g.band)
        band = g.band;
    if (band && band->lo > band->hi) band = Band{0.0, 0.0};  // disjoint supports: result is 0

    GridFunction out(f.grid, std::move(a), band);
    return out;
}

// --- small helpers used across modules ---

inline GridFunction abs_pow(const GridFunction& f, double t)
{
    GridFunction out(f.grid);
    if (t == 1.0) {
        for (std::size_t i = 0; i < f.values.size(); ++i) out.values[i] = std::abs(f.values[i]);
    } else if (t == 2.0) {
        for (std::size_t i = 0; i < f.values.size(); ++i) out.values[i] = std::norm(f.values[i]);
    } else {
        for (std::size_t i = 0; i < f.values.size(); ++i) out.values[i] = std::pow(std::abs(f.values[i]), t);
    }
    return out;
}

inline double max_abs(const GridFunction& f)
{
    double m = 0.0;
    for (const auto& v : f.values) m = std::max(m, std::abs(v));
    return m;
}

inline double max_abs_diff(const GridFunction& f, const GridFunction& g)
{
    double m = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) m = std::max(m, std::abs(f.values[i] - g.values[i]));
    return m;
}

} // namespace shiftlab
