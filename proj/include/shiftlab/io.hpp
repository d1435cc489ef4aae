#pragma once

// File formats:
//  - SHL1 binary samples: magic "SHL1", L (f64 LE), N (u64 LE), band lo/hi
//    (f64 LE, quiet NaN when absent), then N interleaved (re, im) f64 pairs.
//  - JSON sidecars/configs/reports via nlohmann (ordered, human-diffable).
//  - Sweep CSV: header y,K,lhs,rhs,ratio,seconds, one row per record.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "shiftlab/experiments.hpp"
#include "shiftlab/families.hpp"
#include "shiftlab/grid.hpp"
#include "shiftlab/norms.hpp"

namespace shiftlab {

using json = nlohmann::ordered_json;

namespace detail {

inline void put_f64(std::string& buf, double v)
{
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

inline void put_u64(std::string& buf, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline double get_f64(const char* p)
{
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

inline std::uint64_t get_u64(const char* p)
{
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return v;
}

// one fixed quiet-NaN bit pattern so rewrites stay byte-identical
inline double canonical_nan()
{
    const std::uint64_t bits = 0x7ff8000000000000ULL;
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

} // namespace detail

inline std::string encode_shl1(const GridFunction& f)
{
    std::string buf;
    buf.reserve(36 + 16 * f.values.size());
    buf += "SHL1";
    detail::put_f64(buf, f.grid.length);
    detail::put_u64(buf, static_cast<std::uint64_t>(f.grid.samples));
    detail::put_f64(buf, f.band ? f.band->lo : detail::canonical_nan());
    detail::put_f64(buf, f.band ? f.band->hi : detail::canonical_nan());
    for (const auto& v : f.values) {
        detail::put_f64(buf, v.real());
        detail::put_f64(buf, v.imag());
    }
    return buf;
}

inline void write_shl1(const std::string& path, const GridFunction& f)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    const std::string buf = encode_shl1(f);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline GridFunction read_shl1(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 36 || buf.compare(0, 4, "SHL1") != 0)
        throw std::runtime_error("not an SHL1 file (magic mismatch): " + path);
    const double L = detail::get_f64(buf.data() + 4);
    const std::uint64_t N = detail::get_u64(buf.data() + 12);
    const double blo = detail::get_f64(buf.data() + 20);
    const double bhi = detail::get_f64(buf.data() + 28);
    if (buf.size() != 36 + 16 * N)
        throw std::runtime_error("SHL1 payload size mismatch: " + path);
    GridFunction f(make_grid(L, static_cast<std::size_t>(N)));
    if (!std::isnan(blo) && !std::isnan(bhi)) f.band = Band{blo, bhi};
    for (std::size_t i = 0; i < N; ++i) {
        const char* p = buf.data() + 36 + 16 * i;
        f.values[i] = cplx{detail::get_f64(p), detail::get_f64(p + 8)};
    }
    return f;
}

// --- JSON mappings ---

inline json to_json(const FamilySpec& s)
{
    json j;
    j["family"] = family_name(s.family);
    j["y"] = s.y;
    j["spacing"] = s.spacing;
    j["bump_halfwidth"] = s.resolved_halfwidth();
    j["floor_radius"] = s.floor_radius;
    if (s.grid_override) {
        j["grid"] = {{"L", s.grid_override->length}, {"N", s.grid_override->samples}};
    } else {
        j["grid"] = "auto";
    }
    return j;
}

inline FamilySpec family_spec_from_json(const json& j)
{
    FamilySpec s;
    s.family = family_from_name(j.at("family").get<std::string>());
    s.y = j.at("y").get<double>();
    if (j.contains("spacing")) s.spacing = j.at("spacing").get<int>();
    if (j.contains("bump_halfwidth")) s.bump_halfwidth = j.at("bump_halfwidth").get<double>();
    if (j.contains("floor_radius")) s.floor_radius = j.at("floor_radius").get<double>();
    if (j.contains("grid") && j.at("grid").is_object()) {
        s.grid_override = make_grid(j.at("grid").at("L").get<double>(),
                                    j.at("grid").at("N").get<std::size_t>());
    }
    return s;
}

inline json to_json(const SweepSpec& s)
{
    json j;
    j["family"] = family_name(s.family);
    j["p"] = s.p;
    j["q"] = s.q;
    j["t"] = s.t;
    j["sigma"] = s.sigma;
    j["K_list"] = s.K_list;
    j["lhs"] = {{"transform", transform_name(s.lhs_transform)}, {"norm", norm_name(s.lhs_norm)}};
    j["rhs"] = {{"transform", transform_name(s.rhs_transform)}, {"norm", norm_name(s.rhs_norm)}};
    j["spacing"] = s.spacing;
    j["bump_halfwidth"] = s.bump_halfwidth;
    j["floor_radius"] = s.floor_radius;
    j["jobs"] = s.jobs;
    j["timing"] = s.timing;
    return j;
}

inline SweepSpec sweep_spec_from_json(const json& j)
{
    SweepSpec s;
    s.family = family_from_name(j.at("family").get<std::string>());
    s.p = j.at("p").get<double>();
    s.q = j.at("q").get<double>();
    if (j.contains("t")) s.t = j.at("t").get<double>();
    if (j.contains("sigma")) s.sigma = j.at("sigma").get<double>();
    s.K_list = j.at("K_list").get<std::vector<int>>();
    s.lhs_transform = transform_from_name(j.at("lhs").at("transform").get<std::string>());
    s.lhs_norm = norm_from_name(j.at("lhs").at("norm").get<std::string>());
    s.rhs_transform = transform_from_name(j.at("rhs").at("transform").get<std::string>());
    s.rhs_norm = norm_from_name(j.at("rhs").at("norm").get<std::string>());
    if (j.contains("spacing")) s.spacing = j.at("spacing").get<int>();
    if (j.contains("bump_halfwidth")) s.bump_halfwidth = j.at("bump_halfwidth").get<double>();
    if (j.contains("floor_radius")) s.floor_radius = j.at("floor_radius").get<double>();
    if (j.contains("jobs")) s.jobs = j.at("jobs").get<int>();
    if (j.contains("timing")) s.timing = j.at("timing").get<bool>();
    return s;
}

inline json to_json(const FitResult& f)
{
    json j;
    j["exponent"] = f.exponent;
    j["intercept"] = f.intercept;
    j["r_squared"] = f.r_squared;
    j["points"] = f.points;
    return j;
}

inline json to_json(const NormReport& r)
{
    json j;
    j["value"] = r.value;
    const char* variant = r.spec.variant == NormVariant::Strong
                              ? "strong"
                              : (r.spec.variant == NormVariant::WeakL1 ? "weak-l1" : "carleson");
    j["spec"] = {{"p", r.spec.p}, {"q", r.spec.q}, {"variant", variant}};
    j["metadata"] = {{"L", r.grid_length},
                     {"N", r.grid_samples},
                     {"k_min", r.k_min},
                     {"k_max", r.k_max},
                     {"truncation_side_exp", r.truncation_side_exp}};
    return j;
}

// --- sweep CSV ---

inline std::string format_sweep_csv(const std::vector<SweepRecord>& records)
{
    std::string out = "y,K,lhs,rhs,ratio,seconds\n";
    char line[512];
    for (const auto& r : records) {
        if (r.skipped) {
            std::snprintf(line, sizeof line, "%.17g,%d,skipped,skipped,skipped,%.3f\n", r.y, r.K, r.seconds);
        } else {
            std::snprintf(line, sizeof line, "%.17g,%d,%.17g,%.17g,%.17g,%.3f\n",
                          r.y, r.K, r.lhs, r.rhs, r.ratio, r.seconds);
        }
        out += line;
    }
    return out;
}

inline void write_text(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

} // namespace shiftlab
