#pragma once

// y-sweep orchestration and exponent fitting. A sweep walks K over K_list,
// sets y = e^K, builds the family on its auto-sized grid, evaluates the
// lhs/rhs functionals, and records the ratio; fit_exponent then regresses
// ln(ratio) on ln(ln(e+y)).
//
// Levels are streamed through the norm evaluators, so the large sweep grids
// (up to 2^25 samples) never hold a whole transformed family in memory.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <future>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "shiftlab/families.hpp"
#include "shiftlab/norms.hpp"
#include "shiftlab/operators.hpp"

namespace shiftlab {

enum class TransformKind { Identity, Peetre, DyadicMax, ShiftedPhiSup, ShiftedPsiTilde, PsiPlain };
enum class NormKind { Mixed, Carleson, Lp, Hardy };

inline TransformKind transform_from_name(const std::string& s)
{
    if (s == "identity") return TransformKind::Identity;
    if (s == "peetre") return TransformKind::Peetre;
    if (s == "dyadic-max") return TransformKind::DyadicMax;
    if (s == "shifted-phi-sup") return TransformKind::ShiftedPhiSup;
    if (s == "shifted-psitilde") return TransformKind::ShiftedPsiTilde;
    if (s == "psi-plain") return TransformKind::PsiPlain;
    throw std::invalid_argument("unknown transform: " + s);
}

inline const char* transform_name(TransformKind t)
{
    switch (t) {
        case TransformKind::Identity: return "identity";
        case TransformKind::Peetre: return "peetre";
        case TransformKind::DyadicMax: return "dyadic-max";
        case TransformKind::ShiftedPhiSup: return "shifted-phi-sup";
        case TransformKind::ShiftedPsiTilde: return "shifted-psitilde";
        case TransformKind::PsiPlain: return "psi-plain";
    }
    return "?";
}

inline NormKind norm_from_name(const std::string& s)
{
    if (s == "mixed") return NormKind::Mixed;
    if (s == "carleson") return NormKind::Carleson;
    if (s == "lp") return NormKind::Lp;
    if (s == "hardy") return NormKind::Hardy;
    throw std::invalid_argument("unknown norm kind: " + s);
}

inline const char* norm_name(NormKind n)
{
    switch (n) {
        case NormKind::Mixed: return "mixed";
        case NormKind::Carleson: return "carleson";
        case NormKind::Lp: return "lp";
        case NormKind::Hardy: return "hardy";
    }
    return "?";
}

struct SweepSpec {
    FamilyId family = FamilyId::A;
    double p = 1.0;
    double q = 2.0;
    double t = 1.0;
    double sigma = 2.0;
    std::vector<int> K_list;
    TransformKind lhs_transform = TransformKind::Peetre;
    NormKind lhs_norm = NormKind::Mixed;
    TransformKind rhs_transform = TransformKind::Identity;
    NormKind rhs_norm = NormKind::Mixed;
    int spacing = 4;
    double bump_halfwidth = 0.0;  // 0 = family default
    double floor_radius = 0.25;
    int jobs = 1;
    bool timing = false;
};

struct SweepRecord {
    double y = 0.0;
    int K = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    double seconds = 0.0;
    double grid_length = 0.0;
    std::size_t grid_samples = 0;
    bool skipped = false;
    std::string skip_reason;
};

struct FitResult {
    double exponent = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int points = 0;
};

// Refuse parameter tuples outside the theorem hypotheses rather than
// produce unlabeled numbers.
inline void validate_sweep(const SweepSpec& s)
{
    if (s.K_list.empty()) throw std::invalid_argument("sweep: K_list must be nonempty");
    auto needs = [&](TransformKind tr) {
        if (tr == TransformKind::Peetre) {
            const double m = std::min({s.p, s.q, s.t});
            if (!(s.sigma > 1.0 / m)) {
                std::ostringstream os;
                os << "sweep hypothesis violated: sigma = " << s.sigma
                   << " must exceed 1/min(p,q,t) = " << 1.0 / m;
                throw std::invalid_argument(os.str());
            }
        }
        if (tr == TransformKind::DyadicMax) {
            if (!(s.t < std::min(s.p, s.q))) {
                std::ostringstream os;
                os << "sweep hypothesis violated: t = " << s.t
                   << " must be below min(p,q) = " << std::min(s.p, s.q);
                throw std::invalid_argument(os.str());
            }
        }
    };
    needs(s.lhs_transform);
    needs(s.rhs_transform);
}

namespace detail {

inline GridFunction apply_level_transform(const SweepSpec& sp, TransformKind tr,
                                          const GridFunction& f, int k, double y)
{
    switch (tr) {
        case TransformKind::Identity: return f;
        case TransformKind::Peetre: {
            ShiftedOpParams p;
            p.sigma = sp.sigma;
            p.t = sp.t;
            p.k = k;
            p.y = y;
            return peetre_shifted(f, p);
        }
        case TransformKind::DyadicMax: return shifted_dyadic_maximal(f, y, sp.t);
        default: throw std::invalid_argument("transform is not a per-level transform");
    }
}

inline double evaluate_side(const SweepSpec& sp, TransformKind tr, NormKind nk,
                            const FamilyBuild& fb, double y)
{
    const FamilyId id = sp.family;
    if (id == FamilyId::A || id == FamilyId::B) {
        LevelSource src;
        src.grid = fb.grid;
        for (int k = 1; k <= fb.K; ++k) src.levels.push_back(k);
        src.make = [&sp, &fb, tr, y](int k) {
            GridFunction raw = family_level(fb.spec.family, fb.eta, fb.spec.y, k);
            return apply_level_transform(sp, tr, raw, k, y);
        };
        if (nk == NormKind::Mixed) return mixed_norm(src, sp.p, sp.q);
        if (nk == NormKind::Carleson) return carleson_norm(src, sp.q);
        throw std::invalid_argument("unsupported norm kind for a level family");
    }

    if (id == FamilyId::PsiSingle) {
        if (tr == TransformKind::ShiftedPhiSup && nk == NormKind::Lp) {
            const Grid& g = fb.grid;
            std::vector<double> acc(g.samples, 0.0);
            for (int m = 1; m <= fb.K; ++m) {
                const GridFunction c = lp_conv_shifted(fb.single, FilterKind::Phi, m, y);
                for (std::size_t i = 0; i < g.samples; ++i)
                    acc[i] = std::max(acc[i], std::abs(c.values[i]));
            }
            GridFunction sup(g);
            for (std::size_t i = 0; i < g.samples; ++i) sup.values[i] = acc[i];
            return lp_norm(sup, sp.p);
        }
        if (nk == NormKind::Hardy) return hardy_norm(fb.single, sp.p, -3, 4);
        throw std::invalid_argument("unsupported functional for PsiSingle");
    }

    // sparse families: Littlewood-Paley pieces over the active levels,
    // all cut from one cached forward spectrum
    std::set<int> active;
    for (int z : fb.zetas) {
        active.insert(z - 1);
        active.insert(z);
        active.insert(z + 1);
    }
    LevelSource src;
    src.grid = fb.grid;
    for (int j : active) src.levels.push_back(j);
    auto base = std::make_shared<Spectrum>(to_spectrum(fb.single));
    const auto fband = fb.single.band;
    if (tr == TransformKind::ShiftedPsiTilde) {
        src.make = [base, fband, y](int j) {
            return lp_conv_shifted_spectral(*base, fband, FilterKind::PsiTilde, j, y);
        };
    } else if (tr == TransformKind::PsiPlain) {
        src.make = [base, fband](int j) {
            return lp_conv_shifted_spectral(*base, fband, FilterKind::Psi, j, 0.0);
        };
    } else {
        throw std::invalid_argument("unsupported transform for a sparse family");
    }
    if (nk == NormKind::Carleson) return carleson_norm(src, sp.q);
    if (nk == NormKind::Mixed) return mixed_norm(src, sp.p, sp.q);
    throw std::invalid_argument("unsupported norm kind for a sparse family");
}

inline SweepRecord run_point(const SweepSpec& sp, int K)
{
    SweepRecord rec;
    rec.K = K;
    rec.y = std::exp(static_cast<double>(K));
    const auto start = std::chrono::steady_clock::now();
    try {
        FamilySpec fs;
        fs.family = sp.family;
        fs.y = rec.y;
        fs.spacing = sp.spacing;
        fs.bump_halfwidth = sp.bump_halfwidth;
        fs.floor_radius = sp.floor_radius;
        const FamilyBuild fb = build_family(fs);
        rec.grid_length = fb.grid.length;
        rec.grid_samples = fb.grid.samples;
        rec.lhs = evaluate_side(sp, sp.lhs_transform, sp.lhs_norm, fb, rec.y);
        rec.rhs = evaluate_side(sp, sp.rhs_transform, sp.rhs_norm, fb, rec.y);
        rec.ratio = rec.lhs / rec.rhs;
    } catch (const std::exception& e) {
        rec.skipped = true;
        rec.skip_reason = e.what();
    }
    if (sp.timing) {
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    return rec;
}

} // namespace detail

inline std::vector<SweepRecord> growth_sweep(const SweepSpec& spec)
{
    validate_sweep(spec);
    std::vector<int> ks = spec.K_list;
    std::sort(ks.begin(), ks.end());

    std::vector<SweepRecord> out(ks.size());
    if (spec.jobs <= 1) {
        for (std::size_t i = 0; i < ks.size(); ++i) out[i] = detail::run_point(spec, ks[i]);
        return out;
    }

    // bounded pool of independent points; output order stays sorted by K
    std::vector<std::future<SweepRecord>> futs(ks.size());
    std::size_t next = 0;
    std::size_t oldest = 0;
    while (oldest < ks.size()) {
        while (next < ks.size() && next - oldest < static_cast<std::size_t>(spec.jobs)) {
            futs[next] = std::async(std::launch::async,
                                    [&spec, k = ks[next]] { return detail::run_point(spec, k); });
            ++next;
        }
        out[oldest] = futs[oldest].get();
        ++oldest;
    }
    return out;
}

// OLS of ln(ratio) against ln(ln(e+y)).
inline FitResult fit_exponent(const std::vector<SweepRecord>& records)
{
    std::vector<double> xs, ys;
    std::set<int> seen;
    for (const auto& r : records) {
        if (r.skipped) continue;
        if (!(r.ratio > 0.0)) continue;
        if (!seen.insert(r.K).second) continue;
        xs.push_back(std::log(std::log(std::exp(1.0) + r.y)));
        ys.push_back(std::log(r.ratio));
    }
    if (xs.size() < 3)
        throw std::invalid_argument("fit_exponent: need at least 3 records with distinct K");

    const auto n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_exponent: regressor has zero variance");

    FitResult fit;
    fit.exponent = sxy / sxx;
    fit.intercept = my - fit.exponent * mx;
    fit.points = static_cast<int>(xs.size());
    if (syy > 0.0) {
        double ssr = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double e = ys[i] - (fit.intercept + fit.exponent * xs[i]);
            ssr += e * e;
        }
        fit.r_squared = std::clamp(1.0 - ssr / syy, 0.0, 1.0);
    } else {
        fit.r_squared = 1.0;
    }
    return fit;
}

// Random band-limited test families (levels in E(A 2^k)), used by the
// upper-bound sanity checks: random inputs should never beat the extremal
// growth realized by the explicit families.
inline LevelFamily random_band_limited_family(const Grid& g, int k_min, int k_max,
                                              double band_factor, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    LevelFamily fam;
    fam.grid = g;
    fam.k_min = k_min;
    fam.k_max = k_max;
    for (int k = k_min; k <= k_max; ++k) {
        Spectrum s;
        s.grid = g;
        s.coeff.assign(g.samples, cplx{0.0, 0.0});
        const double hi = band_factor * std::ldexp(1.0, k);
        const auto jmax = static_cast<std::int64_t>(std::floor(hi * g.length));
        const auto half = static_cast<std::int64_t>(g.samples / 2);
        for (std::int64_t j = -std::min(jmax, half - 1); j <= std::min(jmax, half - 1); ++j)
            s.at_freq_index(j) = cplx{gauss(rng), gauss(rng)};
        GridFunction f = from_spectrum(s, Band{-hi, hi});
        const double nrm = lp_norm(f, 2.0);
        if (nrm > 0.0)
            for (auto& v : f.values) v /= nrm;
        fam.functions.push_back(std::move(f));
    }
    return fam;
}

} // namespace shiftlab
