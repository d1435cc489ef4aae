#pragma once

// The four counterexample families driving the growth experiments:
//   A: modulated bumps          f_k = eta(x) e^{2 pi i 2^k x},  k = 1..K
//   B: shifted modulated bumps  f_k = eta(x + 2^-k y) e^{2 pi i 2^k x}
//   PsiSingle: f = psi, for the shifted-phi sup experiment
//   Sparse*: single function with bumps at the sparse levels zeta_k
//
// Grid sizing. For A/B the torus is sized so every shift 2^-k y lands well
// inside it (L = smallest power of two > 4 * max shift) and h = 2^-(K+3)
// oversamples the top band 8x. The sparse constructions reach shifts of
// size y itself, which no desk grid can hold unwrapped once y is large;
// they instead run on a fixed-size torus with the shifts taken mod L, and
// the builder verifies that the wrapped bump positions stay pairwise
// separated (the recentering identity and the band bookkeeping are exact
// on the torus either way).

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "shiftlab/filters.hpp"
#include "shiftlab/grid.hpp"
#include "shiftlab/norms.hpp"

namespace shiftlab {

enum class FamilyId { A, B, PsiSingle, SparseModulated, SparseShifted };

inline const char* family_name(FamilyId id)
{
    switch (id) {
        case FamilyId::A: return "A";
        case FamilyId::B: return "B";
        case FamilyId::PsiSingle: return "PsiSingle";
        case FamilyId::SparseModulated: return "SparseModulated";
        case FamilyId::SparseShifted: return "SparseShifted";
    }
    return "?";
}

inline FamilyId family_from_name(const std::string& s)
{
    if (s == "A") return FamilyId::A;
    if (s == "B") return FamilyId::B;
    if (s == "PsiSingle") return FamilyId::PsiSingle;
    if (s == "SparseModulated") return FamilyId::SparseModulated;
    if (s == "SparseShifted") return FamilyId::SparseShifted;
    throw std::invalid_argument("unknown family id: " + s);
}

struct FamilySpec {
    FamilyId family = FamilyId::A;
    double y = 0.0;
    int spacing = 4;              // zeta_k = spacing*k for the sparse families
    double bump_halfwidth = 0.0;  // W; 0 selects the per-family default
    double floor_radius = 0.25;   // R
    std::optional<Grid> grid_override;

    double resolved_halfwidth() const
    {
        if (bump_halfwidth > 0.0) return bump_halfwidth;
        // Sparse pieces include frequency 2^0 = 1, so their bump band must
        // stay inside [1/2, 2]; the A/B bands sit at 2^k and tolerate a wide
        // band, which keeps the bump spatially narrow.
        return (family == FamilyId::SparseModulated || family == FamilyId::SparseShifted) ? 0.25 : 2.0;
    }

    // K = floor(ln(e+y)) for A/B, floor(ln(e+y)/spacing) for the sparse pair
    int level_count() const
    {
        const double l = std::log(std::exp(1.0) + std::fabs(y));
        if (family == FamilyId::SparseModulated || family == FamilyId::SparseShifted)
            return static_cast<int>(std::floor(l / static_cast<double>(spacing)));
        return static_cast<int>(std::floor(l));
    }
};

struct FamilyBuild {
    FamilySpec spec;
    Grid grid;
    int K = 0;                  // A/B: top level; sparse: top sparse index
    LevelFamily family;         // A/B
    GridFunction single;        // PsiSingle / Sparse*
    std::vector<int> zetas;     // sparse levels zeta_k
    std::vector<Band> bands;    // sparse active bands
    EtaResult eta;
    std::vector<std::string> notes;
};

namespace detail {

inline Grid pow2_grid_above(double min_length, double spacing_exp_neg)
{
    double L = 1.0;
    while (L <= min_length) L *= 2.0;
    const double h = std::ldexp(1.0, -static_cast<int>(spacing_exp_neg));
    const auto n = static_cast<std::size_t>(std::llround(L / h));
    return make_grid(L, n);
}

inline void note_standing_assumption(const FamilySpec& spec, std::vector<std::string>& notes)
{
    if (spec.y < 10.0 * std::exp(1.0)) {
        std::ostringstream os;
        os << "y = " << spec.y << " is below the standing assumption |y| > 10e; "
           << "the construction still goes through, flagged for the record";
        notes.push_back(os.str());
    }
}

// pairwise torus separation of bump centers; the growth lower bounds need
// the floor balls at radius R/4 disjoint, i.e. centers at distance >= R/2
inline void check_center_separation(const Grid& g, const std::vector<double>& centers,
                                    double min_sep, const char* who)
{
    for (std::size_t i = 0; i < centers.size(); ++i) {
        for (std::size_t j = i + 1; j < centers.size(); ++j) {
            const double d = g.torus_dist(centers[i] - centers[j]);
            if (d < min_sep) {
                std::ostringstream os;
                os << who << ": bump centers " << centers[i] << " and " << centers[j]
                   << " are only " << d << " apart on the torus (need >= " << min_sep << ")";
                throw std::invalid_argument(os.str());
            }
        }
    }
}

} // namespace detail

// One level of family A or B on a prebuilt bump.
inline GridFunction family_level(FamilyId id, const EtaResult& eta, double y, int k)
{
    const double freq = std::ldexp(1.0, k);
    if (id == FamilyId::A) return modulate(eta.eta, freq);
    if (id == FamilyId::B) {
        const double shift = std::ldexp(y, -k);
        return modulate(translate(eta.eta, -shift), freq);
    }
    throw std::invalid_argument("family_level: only families A and B have levels");
}

inline Grid family_grid(const FamilySpec& spec)
{
    if (spec.grid_override) return *spec.grid_override;
    const int K = spec.level_count();
    switch (spec.family) {
        case FamilyId::A:
        case FamilyId::B:
            // shifts reach y/2; L = smallest power of two > 4*(y/2)
            return detail::pow2_grid_above(2.0 * spec.y, static_cast<double>(K + 3));
        case FamilyId::PsiSingle:
            return detail::pow2_grid_above(2.0 * spec.y, 5.0);
        case FamilyId::SparseModulated:
        case FamilyId::SparseShifted: {
            const int zeta_max = spec.spacing * K;
            double L = 2048.0;
            const double h_exp = static_cast<double>(zeta_max + 2);
            return detail::pow2_grid_above(L - 1.0, h_exp);
        }
    }
    throw std::logic_error("family_grid: unreachable");
}

inline FamilyBuild build_family_a(const FamilySpec& spec)
{
    if (spec.family != FamilyId::A) throw std::invalid_argument("build_family_a: wrong family id");
    FamilyBuild out;
    out.spec = spec;
    out.grid = family_grid(spec);
    out.K = spec.level_count();
    if (out.K < 1) throw std::invalid_argument("build_family_a: y too small, no levels");
    detail::note_standing_assumption(spec, out.notes);

    const double W = spec.resolved_halfwidth();
    out.eta = make_eta(out.grid, W, spec.floor_radius);

    out.family.grid = out.grid;
    out.family.k_min = 1;
    out.family.k_max = out.K;
    for (int k = 1; k <= out.K; ++k)
        out.family.functions.push_back(family_level(FamilyId::A, out.eta, spec.y, k));

    // lower-bound geometry: the balls |x - 2^-m y| <= R/4 must be disjoint
    std::vector<double> centers;
    for (int m = 1; m <= out.K; ++m) centers.push_back(std::ldexp(spec.y, -m));
    detail::check_center_separation(out.grid, centers, spec.floor_radius / 2.0, "family A");
    return out;
}

inline FamilyBuild build_family_b(const FamilySpec& spec)
{
    if (spec.family != FamilyId::B) throw std::invalid_argument("build_family_b: wrong family id");
    FamilyBuild out;
    out.spec = spec;
    out.grid = family_grid(spec);
    out.K = spec.level_count();
    if (out.K < 1) throw std::invalid_argument("build_family_b: y too small, no levels");
    detail::note_standing_assumption(spec, out.notes);

    const double W = spec.resolved_halfwidth();
    out.eta = make_eta(out.grid, W, spec.floor_radius);

    out.family.grid = out.grid;
    out.family.k_min = 1;
    out.family.k_max = out.K;
    for (int k = 1; k <= out.K; ++k)
        out.family.functions.push_back(family_level(FamilyId::B, out.eta, spec.y, k));

    std::vector<double> centers;
    for (int m = 1; m <= out.K; ++m) centers.push_back(-std::ldexp(spec.y, -m));
    detail::check_center_separation(out.grid, centers, spec.floor_radius / 2.0, "family B");
    return out;
}

inline GridFunction build_psi_single(const Grid& grid)
{
    return make_filter(grid, FilterKind::Psi, 0);
}

inline FamilyBuild build_sparse(const FamilySpec& spec)
{
    if (spec.family != FamilyId::SparseModulated && spec.family != FamilyId::SparseShifted)
        throw std::invalid_argument("build_sparse: wrong family id");
    FamilyBuild out;
    out.spec = spec;
    out.K = spec.level_count();
    detail::note_standing_assumption(spec, out.notes);

    // cap K so the top frequency 2^{spacing K} stays on a desk grid
    const int k_cap = 24 / spec.spacing;
    if (out.K > k_cap) {
        std::ostringstream os;
        os << "sparse K capped from " << out.K << " to " << k_cap
           << " (frequency 2^" << spec.spacing * out.K << " overflows the grid)";
        out.notes.push_back(os.str());
        out.K = k_cap;
    }
    if (spec.grid_override) {
        out.grid = *spec.grid_override;
    } else {
        const int zeta_max = spec.spacing * out.K;
        const double L = 2048.0;
        const auto N = static_cast<std::size_t>(std::llround(L * std::ldexp(1.0, zeta_max + 2)));
        out.grid = make_grid(L, N);
    }

    const double W = spec.resolved_halfwidth();
    out.eta = make_eta(out.grid, W, spec.floor_radius);

    for (int k = 0; k <= out.K; ++k) out.zetas.push_back(spec.spacing * k);

    // wrapped bump positions must stay separated; widen the torus if not.
    // The bump falls below 1% of its peak at distance ~1.5/W, so that is
    // where cube averages of distinct bumps stop contaminating each other;
    // the psi~ recovery identity itself is spectral and does not care.
    if (spec.family == FamilyId::SparseShifted) {
        for (int attempt = 0;; ++attempt) {
            std::vector<double> centers{0.0};  // the recentered pileup target
            for (int z : out.zetas) centers.push_back(-std::ldexp(spec.y, -z));
            const double min_sep = std::max(1.5 / W, 4.0 * spec.floor_radius);
            try {
                detail::check_center_separation(out.grid, centers, min_sep, "sparse family");
                break;
            } catch (const std::invalid_argument&) {
                if (attempt >= 2) throw;
                out.grid = make_grid(out.grid.length * 2.0, out.grid.samples * 2);
                out.eta = make_eta(out.grid, W, spec.floor_radius);
                out.notes.push_back("torus doubled to separate wrapped bump positions");
            }
        }
    }

    out.single = GridFunction(out.grid);
    for (int z : out.zetas) {
        const double freq = std::ldexp(1.0, z);
        GridFunction piece = (spec.family == FamilyId::SparseModulated)
                                 ? modulate(out.eta.eta, freq)
                                 : modulate(translate(out.eta.eta, -std::ldexp(spec.y, -z)), freq);
        for (std::size_t i = 0; i < out.single.values.size(); ++i)
            out.single.values[i] += piece.values[i];
        out.bands.push_back(Band{freq - W, freq + W});
    }
    out.single.band = Band{out.bands.front().lo, out.bands.back().hi};
    return out;
}

inline FamilyBuild build_family(const FamilySpec& spec)
{
    switch (spec.family) {
        case FamilyId::A: return build_family_a(spec);
        case FamilyId::B: return build_family_b(spec);
        case FamilyId::PsiSingle: {
            FamilyBuild out;
            out.spec = spec;
            out.grid = family_grid(spec);
            out.K = static_cast<int>(std::floor(std::log(std::exp(1.0) + std::fabs(spec.y))));
            out.single = build_psi_single(out.grid);
            detail::note_standing_assumption(spec, out.notes);
            return out;
        }
        case FamilyId::SparseModulated:
        case FamilyId::SparseShifted: return build_sparse(spec);
    }
    throw std::logic_error("build_family: unreachable");
}

} // namespace shiftlab
