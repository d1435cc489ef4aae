#pragma once

// run_verify_suite: named invariant and oracle checks with residuals,
// grouped by selector. "exact-identities" holds the identities the theory
// makes exact on the grid; "oracles" compares fast paths against brute
// force on small grids; the remaining groups cover the module invariants.
// Any failure is reported, never thrown.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "shiftlab/ay.hpp"
#include "shiftlab/cz.hpp"
#include "shiftlab/experiments.hpp"
#include "shiftlab/families.hpp"
#include "shiftlab/norms.hpp"
#include "shiftlab/operators.hpp"

namespace shiftlab {

struct CheckResult {
    std::string name;
    bool pass = false;
    double residual = 0.0;
    double tolerance = 0.0;
};

namespace verify_detail {

inline double rel_diff(const GridFunction& a, const GridFunction& b)
{
    const double scale = std::max({max_abs(a), max_abs(b), 1e-300});
    return max_abs_diff(a, b) / scale;
}

inline void push(std::vector<CheckResult>& out, const std::string& name, double residual, double tol)
{
    out.push_back(CheckResult{name, residual <= tol, residual, tol});
}

// ten deterministic band-limited functions on a shared grid
inline std::vector<GridFunction> test_corpus(const Grid& g, std::uint64_t seed)
{
    std::vector<GridFunction> fs;
    GridFunction one(g);
    for (auto& v : one.values) v = 1.0;
    one.band = Band{0.0, 0.0};
    fs.push_back(one);

    const EtaResult eta = make_eta(g, 2.0, 0.25);
    fs.push_back(eta.eta);
    fs.push_back(modulate(eta.eta, 4.0));
    fs.push_back(translate(eta.eta, 0.3));
    fs.push_back(make_filter(g, FilterKind::Psi, 1));
    fs.push_back(make_filter(g, FilterKind::Phi, 0));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_band = [&](double lo, double hi) {
        Spectrum s;
        s.grid = g;
        s.coeff.assign(g.samples, cplx{0.0, 0.0});
        for (std::size_t i = 0; i < g.samples; ++i) {
            const double xi = s.freq_at(i);
            if (xi >= lo && xi <= hi) s.coeff[i] = cplx{gauss(rng), gauss(rng)};
        }
        return from_spectrum(s, Band{lo, hi});
    };
    fs.push_back(random_band(-8.0, 8.0));
    fs.push_back(random_band(2.0, 16.0));

    // indicator of a dyadic cube mollified through phi_2
    GridFunction ind(g);
    for (std::size_t i = 0; i < g.samples / 4; ++i) ind.values[i] = 1.0;
    fs.push_back(convolve(ind, make_filter(g, FilterKind::Phi, 2)));

    GridFunction two_bumps(g);
    {
        const GridFunction t1 = translate(eta.eta, 0.5);
        const GridFunction t2 = translate(eta.eta, -0.75);
        for (std::size_t i = 0; i < g.samples; ++i) two_bumps.values[i] = t1.values[i] + 0.5 * t2.values[i];
        two_bumps.band = Band{-2.0, 2.0};
    }
    fs.push_back(two_bumps);
    return fs;
}

inline GridFunction pow_pointwise(const GridFunction& f, double e)
{
    GridFunction out(f.grid);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        out.values[i] = std::pow(std::abs(f.values[i]), e);
    return out;
}

// ---- exact identities ----

inline void check_exact_identities(std::vector<CheckResult>& out, std::uint64_t seed)
{
    const Grid g = make_grid(4.0, 4096);
    const auto corpus = test_corpus(g, seed);
    const double y = 17.3;
    const int k = 2;
    const double shift = detail::snap_to_grid(g, std::ldexp(y, -k));

    double cov1 = 0.0, covinf = 0.0, lpid = 0.0, dil = 0.0, par = 0.0, comm = 0.0, conv_id = 0.0;
    for (const auto& f : corpus) {
        {
            ShiftedOpParams p{2.0, 1.0, k, y, 0};
            ShiftedOpParams p0{2.0, 1.0, k, 0.0, 0};
            cov1 = std::max(cov1, rel_diff(peetre_shifted(f, p), translate(peetre_shifted(f, p0), shift)));
        }
        {
            ShiftedOpParams p{2.5, t_infinity, k, y, 0};
            ShiftedOpParams p0{2.5, t_infinity, k, 0.0, 0};
            covinf = std::max(covinf, rel_diff(peetre_shifted(f, p), translate(peetre_shifted(f, p0), shift)));
        }
        lpid = std::max(lpid, rel_diff(lp_conv_shifted(f, FilterKind::Phi, k, y),
                                       translate(convolve(f, make_filter(g, FilterKind::Phi, k)), std::ldexp(y, -k))));
        {
            const double t = 0.5;
            const GridFunction lhs = shifted_dyadic_maximal(f, y, t);
            const GridFunction m1 = shifted_dyadic_maximal(abs_pow(f, t), y, 1.0);
            dil = std::max(dil, rel_diff(lhs, pow_pointwise(m1, 1.0 / t)));
        }
        {
            detail::KahanSum s;
            for (const auto& v : f.values) s.add(std::norm(v));
            const double lhs = g.spacing * s.value();
            const double rhs = spectral_energy(to_spectrum(f));
            par = std::max(par, std::fabs(lhs - rhs) / std::max({lhs, rhs, 1e-300}));
        }
        {
            // modulate(translate(f,a), xi0) picks up e^{+2 pi i xi0 a}
            // relative to translating the modulated function
            const double a = 0.37, xi0 = 3.0;
            GridFunction lhs = modulate(translate(f, a), xi0);
            GridFunction rhs = translate(modulate(f, xi0), a);
            const cplx phase = std::exp(cplx{0.0, 2.0 * std::numbers::pi * xi0 * a});
            for (auto& v : rhs.values) v *= phase;
            comm = std::max(comm, rel_diff(lhs, rhs));
        }
        {
            GridFunction delta(g);
            delta.values[0] = 1.0 / g.spacing;
            conv_id = std::max(conv_id, rel_diff(convolve(f, delta), f));
        }
    }
    push(out, "peetre-shift-covariance-t1", cov1, 1e-10);
    push(out, "peetre-shift-covariance-tinf", covinf, 1e-10);
    push(out, "lp-conv-shift-identity", lpid, 1e-10);
    push(out, "dyadic-max-dilation-identity", dil, 1e-10);
    push(out, "parseval", par, 1e-10);
    push(out, "modulate-translate-commutation", comm, 1e-12);
    push(out, "convolve-identity-element", conv_id, 1e-12);

    // psi~ transfer equals 1 on the annulus; LP filters telescope to 1
    Spectrum freq_probe;
    freq_probe.grid = g;
    freq_probe.coeff.assign(g.samples, cplx{0.0, 0.0});
    {
        double res = 0.0;
        const int kk = 3;
        for (std::size_t i = 0; i < g.samples; ++i) {
            const double xi = freq_probe.freq_at(i);
            const double axi = std::fabs(xi);
            if (axi >= std::ldexp(1.0, kk - 1) && axi <= std::ldexp(1.0, kk + 1))
                res = std::max(res, std::fabs(filter_transfer(FilterKind::PsiTilde, kk, xi) - 1.0));
        }
        push(out, "psitilde-annulus-identity", res, 1e-12);
    }
    {
        double res = 0.0;
        const int k_lo = -2, k_hi = 6;
        for (std::size_t i = 0; i < g.samples; ++i) {
            const double xi = freq_probe.freq_at(i);
            const double axi = std::fabs(xi);
            if (axi < std::ldexp(1.0, k_lo) || axi > std::ldexp(1.0, k_hi - 1)) continue;
            double sum = 0.0;
            for (int kk = k_lo; kk <= k_hi; ++kk) sum += filter_transfer(FilterKind::Psi, kk, xi);
            res = std::max(res, std::fabs(sum - 1.0));
        }
        push(out, "lp-partition-of-unity", res, 1e-12);
    }
}

// ---- brute-force oracles (N <= 512) ----

inline void check_oracles(std::vector<CheckResult>& out, std::uint64_t seed)
{
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> gauss(0.0, 1.0);

    {
        // spectrum round-trip against the O(N^2) DFT
        const Grid g = make_grid(2.0, 256);
        GridFunction f(g);
        for (auto& v : f.values) v = cplx{gauss(rng), gauss(rng)};
        const Spectrum s = to_spectrum(f);
        double res = 0.0;
        const auto n = static_cast<std::int64_t>(g.samples);
        for (std::size_t idx = 0; idx < g.samples; ++idx) {
            const std::int64_t j = s.freq_index_at(idx);
            cplx acc{0.0, 0.0};
            for (std::int64_t i = 0; i < n; ++i) {
                const std::int64_t r = ((i * j) % n + n) % n;
                const double ang = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n);
                acc += f.values[static_cast<std::size_t>(i)] * cplx{std::cos(ang), std::sin(ang)};
            }
            acc *= g.spacing;
            res = std::max(res, std::abs(acc - s.coeff[idx]));
        }
        const double scale = std::max(1e-300, max_abs(f));
        push(out, "oracle-dft", res / scale, 1e-12);
        push(out, "oracle-spectrum-roundtrip", rel_diff(from_spectrum(s), f), 1e-12);
    }
    {
        // convolution against the direct sum
        const Grid g = make_grid(2.0, 512);
        GridFunction f(g), h(g);
        for (auto& v : f.values) v = cplx{gauss(rng), gauss(rng)};
        for (auto& v : h.values) v = cplx{gauss(rng), gauss(rng)};
        const GridFunction c = convolve(f, h);
        double res = 0.0;
        const std::size_t n = g.samples;
        for (std::size_t i = 0; i < n; ++i) {
            cplx acc{0.0, 0.0};
            for (std::size_t j = 0; j < n; ++j) acc += f.values[j] * h.values[(i + n - j) % n];
            acc *= g.spacing;
            res = std::max(res, std::abs(acc - c.values[i]));
        }
        push(out, "oracle-convolution", res / std::max(1e-300, max_abs(c)), 1e-9);
    }
    {
        // dyadic averages and the shifted maximal function vs direct windows
        const Grid g = make_grid(2.0, 256);
        GridFunction f(g);
        for (auto& v : f.values) v = cplx{gauss(rng), 0.0};
        const double y = 5.21;
        double res_avg = 0.0;
        for (int s = -g.length_exp; s <= g.samples_exp - g.length_exp; ++s) {
            const GridFunction got = dyadic_average(f, s, y);
            const std::size_t w = detail::cube_width(g, s);
            const std::size_t nc = detail::cube_count(g, s);
            const auto off = static_cast<std::int64_t>(
                std::llround(detail::snap_to_grid(g, std::ldexp(y, -s)) / g.spacing));
            for (std::size_t c = 0; c < nc; ++c) {
                cplx acc{0.0, 0.0};
                for (std::size_t i = 0; i < w; ++i) {
                    const auto idx = static_cast<std::size_t>(
                        ((static_cast<std::int64_t>(c * w + i) + off) % static_cast<std::int64_t>(g.samples) +
                         static_cast<std::int64_t>(g.samples)) % static_cast<std::int64_t>(g.samples));
                    acc += f.values[idx];
                }
                acc /= static_cast<double>(w);
                res_avg = std::max(res_avg, std::abs(acc - got.values[c * w]));
            }
        }
        push(out, "oracle-dyadic-average", res_avg / std::max(1e-300, max_abs(f)), 1e-12);

        const double t = 1.5;
        const GridFunction got = shifted_dyadic_maximal(f, y, t);
        std::vector<double> brute(g.samples, 0.0);
        for (int s = -g.length_exp; s <= g.samples_exp - g.length_exp; ++s) {
            const GridFunction avg = dyadic_average(abs_pow(f, t), s, y);
            for (std::size_t i = 0; i < g.samples; ++i)
                brute[i] = std::max(brute[i], avg.values[i].real());
        }
        double res_max = 0.0;
        for (std::size_t i = 0; i < g.samples; ++i)
            res_max = std::max(res_max, std::fabs(std::pow(brute[i], 1.0 / t) - got.values[i].real()));
        push(out, "oracle-shifted-dyadic-max", res_max / std::max(1e-300, max_abs(got)), 1e-12);
    }
    {
        // Peetre t=1 vs the direct weighted double sum, and the dual route
        // through the Lambda kernel
        const Grid g = make_grid(2.0, 256);
        GridFunction f(g);
        for (auto& v : f.values) v = cplx{gauss(rng), gauss(rng)};
        ShiftedOpParams p{2.0, 1.0, 1, 3.7, 0};
        const GridFunction got = peetre_shifted(f, p);
        const GridFunction kern = lambda_kernel(g, p.k, p.sigma * p.t, p.y, p.wraps);
        double res = 0.0;
        const std::size_t n = g.samples;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t d = 0; d < n; ++d)
                acc += kern.values[d].real() * std::abs(f.values[(i + n - d) % n]);
            acc *= g.spacing;
            res = std::max(res, std::fabs(acc - got.values[i].real()));
        }
        push(out, "oracle-peetre-direct-sum", res / std::max(1e-300, max_abs(got)), 1e-10);

        const GridFunction dual = lambda_convolve(abs_pow(f, 1.0), p.k, p.sigma, p.y, p.wraps);
        push(out, "peetre-lambda-dual-route", rel_diff(got, dual), 1e-10);
    }
    {
        // carleson norm vs the brute-force cube loop
        const Grid g = make_grid(2.0, 128);
        LevelFamily fam;
        fam.grid = g;
        fam.k_min = -1;
        fam.k_max = 3;
        for (int k = fam.k_min; k <= fam.k_max; ++k) {
            GridFunction f(g);
            for (auto& v : f.values) v = cplx{gauss(rng), gauss(rng)};
            fam.functions.push_back(std::move(f));
        }
        const double q = 2.0;
        const double got = carleson_norm(fam, q);
        double brute = 0.0;
        for (int s = -g.length_exp; s <= g.samples_exp - g.length_exp; ++s) {
            const std::size_t w = detail::cube_width(g, s);
            const std::size_t nc = detail::cube_count(g, s);
            for (std::size_t c = 0; c < nc; ++c) {
                double acc = 0.0;
                for (std::size_t i = c * w; i < (c + 1) * w; ++i)
                    for (int k = std::max(s, fam.k_min); k <= fam.k_max; ++k)
                        acc += std::norm(fam.at_level(k).values[i]);
                acc *= g.spacing * std::ldexp(1.0, s);
                brute = std::max(brute, acc);
            }
        }
        brute = std::sqrt(brute);
        push(out, "oracle-carleson-brute", std::fabs(got - brute) / std::max(1e-300, brute), 1e-10);

        const GridFunction s1 = sharp_q1(fam, q);
        push(out, "sharpq1-max-equals-carleson", std::fabs(max_abs(s1) - got), 0.0);
    }
    {
        // sharp_q2 vs the quadruple loop
        const Grid g = make_grid(1.0, 64);
        LevelFamily fam;
        fam.grid = g;
        fam.k_min = 0;
        fam.k_max = 2;
        for (int k = 0; k <= 2; ++k) {
            GridFunction f(g);
            for (auto& v : f.values) v = cplx{std::fabs(gauss(rng)), 0.0};
            fam.functions.push_back(std::move(f));
        }
        const double q = 2.0;
        const GridFunction got = sharp_q2(fam, q);
        std::vector<double> brute(g.samples, 0.0);
        for (int s = -g.length_exp; s <= g.samples_exp - g.length_exp; ++s) {
            const std::size_t w = detail::cube_width(g, s);
            const std::size_t nc = detail::cube_count(g, s);
            for (std::size_t c = 0; c < nc; ++c) {
                double acc = 0.0;
                for (int k = fam.k_min; k <= fam.k_max && k < s; ++k) {
                    const auto& v = fam.at_level(k).values;
                    for (std::size_t z = c * w; z < (c + 1) * w; ++z)
                        for (std::size_t u = c * w; u < (c + 1) * w; ++u)
                            acc += std::fabs(std::pow(std::abs(v[z]), q) - std::pow(std::abs(v[u]), q));
                }
                acc /= static_cast<double>(w) * static_cast<double>(w);
                for (std::size_t i = c * w; i < (c + 1) * w; ++i) brute[i] = std::max(brute[i], acc);
            }
        }
        double res = 0.0;
        for (std::size_t i = 0; i < g.samples; ++i)
            res = std::max(res, std::fabs(std::pow(brute[i], 1.0 / q) - got.values[i].real()));
        push(out, "oracle-sharpq2-quadruple-loop", res / std::max(1e-300, max_abs(got)), 1e-10);
    }
    {
        // weak L1 vs the threshold scan (exact)
        const Grid g = make_grid(1.0, 256);
        GridFunction f(g);
        for (auto& v : f.values) v = cplx{gauss(rng), gauss(rng)};
        const double got = weak_l1_norm(f);
        std::vector<double> vals(g.samples);
        for (std::size_t i = 0; i < g.samples; ++i) vals[i] = std::abs(f.values[i]);
        std::sort(vals.begin(), vals.end(), std::greater<double>());
        double scan = 0.0;
        for (std::size_t i = 0; i < vals.size(); ++i)
            scan = std::max(scan, vals[i] * (static_cast<double>(i + 1) * g.spacing));
        push(out, "oracle-weak-l1-threshold-scan", std::fabs(got - scan), 0.0);
    }
    {
        // hl_maximal sandwiched by the all-window brute force
        const Grid g = make_grid(1.0, 256);
        GridFunction f(g);
        for (auto& v : f.values) v = cplx{gauss(rng), gauss(rng)};
        const double t = 1.0;
        const GridFunction got = hl_maximal(f, t);
        const std::size_t n = g.samples;
        std::vector<double> a(n);
        for (std::size_t i = 0; i < n; ++i) a[i] = std::abs(f.values[i]);
        std::vector<double> brute(n, 0.0);
        for (std::size_t len = 1; len <= n; ++len) {
            for (std::size_t st = 0; st < n; ++st) {
                double acc = 0.0;
                for (std::size_t i = 0; i < len; ++i) acc += a[(st + i) % n];
                acc /= static_cast<double>(len);
                for (std::size_t i = 0; i < len; ++i) {
                    const std::size_t x = (st + i) % n;
                    brute[x] = std::max(brute[x], acc);
                }
            }
        }
        double viol = 0.0;
        const double factor = std::pow(2.0, 1.0 / t);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = got.values[i].real();
            viol = std::max(viol, std::max(d - brute[i], brute[i] - factor * d));
        }
        push(out, "oracle-hl-max-window-sandwich", viol / std::max(1e-300, max_abs(got)), 1e-12);
    }
    {
        // Lambda kernel mass against the closed form 2/(sigma-1)
        const Grid g = make_grid(1.0, 1024);
        double worst = 0.0;
        for (double sigma : {1.5, 2.0, 3.0}) {
            const GridFunction k0 = lambda_kernel(g, 0, sigma, 0.0);
            detail::KahanSum s;
            for (const auto& v : k0.values) s.add(v.real());
            const double mass = g.spacing * s.value();
            const double exact = 2.0 / (sigma - 1.0);
            worst = std::max(worst, std::fabs(mass - exact) / exact);
        }
        push(out, "lambda-mass-closed-form", worst, 1e-2);
    }
}

} // namespace verify_detail

inline std::vector<CheckResult> run_verify_suite(const std::string& selector, std::uint64_t seed = 12345)
{
    std::vector<CheckResult> out;
    bool known = false;
    if (selector == "exact-identities" || selector == "all") {
        verify_detail::check_exact_identities(out, seed);
        known = true;
    }
    if (selector == "oracles" || selector == "all") {
        verify_detail::check_oracles(out, seed);
        known = true;
    }
    if (!known) throw std::invalid_argument("run_verify_suite: unknown selector '" + selector + "'");
    return out;
}

} // namespace shiftlab
