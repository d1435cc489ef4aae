// shiftlab: generation, operator application, norm evaluation, growth
// sweeps, Calderon-Zygmund reports, A_y estimation, and the verify suite,
// all from one binary.
//
// Exit codes: 0 success, 1 domain/usage error (message names the violated
// precondition), 2 verification failure.
//
// Every run writes <out>.manifest.json recording the command line (numeric
// flags echoed exactly as typed), parsed parameters, outputs, and wall time.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shiftlab/ay.hpp"
#include "shiftlab/cz.hpp"
#include "shiftlab/experiments.hpp"
#include "shiftlab/io.hpp"
#include "shiftlab/verify.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

std::string resolve_out(const std::string& path)
{
    if (path.empty() || path.front() == '/') return path;
    const char* dir = std::getenv("SHIFTLAB_OUTDIR");
    if (!dir || !*dir) return path;
    return (std::filesystem::path(dir) / path).string();
}

struct ManifestWriter {
    shiftlab::json doc;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    std::vector<std::string> outputs;

    ManifestWriter(const std::string& command, int argc, char** argv)
    {
        doc["command"] = command;
        shiftlab::json raw = shiftlab::json::array();
        for (int i = 0; i < argc; ++i) raw.push_back(std::string(argv[i]));
        doc["argv"] = raw;
        doc["version"] = kVersion;
        const auto now = std::chrono::system_clock::now().time_since_epoch();
        doc["started_unix_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
    }

    void finish(const std::string& anchor_output)
    {
        doc["outputs"] = outputs;
        doc["wall_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        shiftlab::write_text(anchor_output + ".manifest.json", doc.dump(2) + "\n");
    }
};

using namespace shiftlab;

int cmd_gen(const std::string& family, int K, double y_flag, int spacing, double W, double R,
            const std::string& out, ManifestWriter& mani)
{
    FamilySpec spec;
    spec.family = family_from_name(family);
    spec.y = (y_flag > 0.0) ? y_flag : std::exp(static_cast<double>(K));
    spec.spacing = spacing;
    spec.bump_halfwidth = W;
    spec.floor_radius = R;

    const FamilyBuild fb = build_family(spec);

    json sidecar;
    FamilySpec resolved = spec;
    resolved.grid_override = fb.grid;  // resolved grid makes rebuilds exact
    sidecar["spec"] = to_json(resolved);
    sidecar["K"] = fb.K;
    sidecar["notes"] = fb.notes;

    std::vector<std::string> files;
    if (spec.family == FamilyId::A || spec.family == FamilyId::B) {
        sidecar["k_min"] = fb.family.k_min;
        sidecar["k_max"] = fb.family.k_max;
        sidecar["eta_floor"] = fb.eta.floor_value;
        for (int k = fb.family.k_min; k <= fb.family.k_max; ++k) {
            char suffix[32];
            std::snprintf(suffix, sizeof suffix, ".k%02d.shl1", k);
            const std::string path = out + suffix;
            write_shl1(path, fb.family.at_level(k));
            files.push_back(path);
        }
    } else {
        const std::string path = out + ".shl1";
        write_shl1(path, fb.single);
        files.push_back(path);
        if (!fb.zetas.empty()) {
            sidecar["zetas"] = fb.zetas;
            json bands = json::array();
            for (const auto& b : fb.bands) bands.push_back({{"lo", b.lo}, {"hi", b.hi}});
            sidecar["bands"] = bands;
        }
    }
    sidecar["files"] = files;
    const std::string side_path = out + ".family.json";
    write_text(side_path, sidecar.dump(2) + "\n");

    mani.outputs = files;
    mani.outputs.push_back(side_path);
    mani.doc["parsed"] = to_json(resolved);
    mani.finish(out);
    for (const auto& n : fb.notes) std::cerr << "note: " << n << "\n";
    std::cout << "wrote " << files.size() << " function file(s) + " << side_path << "\n";
    return 0;
}

int cmd_apply(const std::string& op, const std::string& in, const std::string& out, double sigma,
              double t, int k, double y, const std::string& filter, int wraps, ManifestWriter& mani)
{
    const GridFunction f = read_shl1(in);
    GridFunction result(f.grid);
    if (op == "identity") {
        result = f;
    } else if (op == "peetre") {
        ShiftedOpParams p{sigma, t, k, y, wraps};
        result = peetre_shifted(f, p);
    } else if (op == "dyadic-avg") {
        result = dyadic_average(f, k, y);
    } else if (op == "dyadic-max") {
        result = shifted_dyadic_maximal(f, y, t);
    } else if (op == "hl-max") {
        result = hl_maximal(f, t);
    } else if (op == "lp-conv") {
        FilterKind kind = FilterKind::Phi;
        if (filter == "psi") kind = FilterKind::Psi;
        else if (filter == "psitilde") kind = FilterKind::PsiTilde;
        else if (filter != "phi") throw std::invalid_argument("unknown filter: " + filter);
        result = lp_conv_shifted(f, kind, k, y);
    } else if (op == "lambda-conv") {
        result = lambda_convolve(f, k, sigma, y, wraps);
    } else {
        throw std::invalid_argument("unknown op: " + op);
    }
    write_shl1(out, result);
    mani.outputs.push_back(out);
    mani.doc["parsed"] = {{"op", op},      {"in", in}, {"sigma", sigma}, {"t", t},
                          {"k", k},        {"y", y},   {"filter", filter}, {"wraps", wraps}};
    mani.finish(out);
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_norm(const std::string& in, const std::string& family_json, double p, double q,
             const std::string& variant, const std::string& out, ManifestWriter& mani)
{
    NormReport report;
    report.spec.p = p;
    report.spec.q = q;

    if (!family_json.empty()) {
        const json side = json::parse(read_text(family_json));
        LevelFamily fam;
        fam.k_min = side.at("k_min").get<int>();
        fam.k_max = side.at("k_max").get<int>();
        const auto files = side.at("files").get<std::vector<std::string>>();
        for (const auto& path : files) fam.functions.push_back(read_shl1(path));
        fam.grid = fam.functions.front().grid;
        report.grid_length = fam.grid.length;
        report.grid_samples = fam.grid.samples;
        report.k_min = fam.k_min;
        report.k_max = fam.k_max;
        report.truncation_side_exp = -fam.grid.length_exp;
        if (variant == "strong") {
            report.spec.variant = NormVariant::Strong;
            report.value = mixed_norm(fam, p, q);
        } else if (variant == "carleson") {
            report.spec.variant = NormVariant::Carleson;
            report.value = carleson_norm(fam, q);
        } else {
            throw std::invalid_argument("family norms support variants strong|carleson, got " + variant);
        }
    } else {
        const GridFunction f = read_shl1(in);
        report.grid_length = f.grid.length;
        report.grid_samples = f.grid.samples;
        report.truncation_side_exp = -f.grid.length_exp;
        if (variant == "strong") {
            report.spec.variant = NormVariant::Strong;
            report.value = lp_norm(f, p);
        } else if (variant == "weak-l1") {
            report.spec.variant = NormVariant::WeakL1;
            report.value = weak_l1_norm(f);
        } else {
            throw std::invalid_argument("single-function norms support variants strong|weak-l1, got " + variant);
        }
    }

    const json j = to_json(report);
    std::cout << j.dump(2) << "\n";
    if (!out.empty()) {
        write_text(out, j.dump(2) + "\n");
        mani.outputs.push_back(out);
        mani.doc["parsed"] = {{"p", p}, {"q", q}, {"variant", variant}};
        mani.finish(out);
    }
    return 0;
}

int cmd_sweep(const std::string& config, const std::string& out, int jobs, bool timing,
              ManifestWriter& mani)
{
    SweepSpec spec = sweep_spec_from_json(json::parse(read_text(config)));
    if (jobs > 0) spec.jobs = jobs;
    if (timing) spec.timing = true;

    const auto records = growth_sweep(spec);
    write_text(out, format_sweep_csv(records));
    mani.outputs.push_back(out);

    std::string fit_note = "fit skipped: fewer than 3 usable records";
    try {
        const FitResult fit = fit_exponent(records);
        const std::string fit_path = out + ".fit.json";
        write_text(fit_path, to_json(fit).dump(2) + "\n");
        mani.outputs.push_back(fit_path);
        char buf[160];
        std::snprintf(buf, sizeof buf, "fitted exponent %.4f (R^2 = %.4f, %d points)",
                      fit.exponent, fit.r_squared, fit.points);
        fit_note = buf;
    } catch (const std::exception& e) {
        fit_note = std::string("fit refused: ") + e.what();
    }

    mani.doc["parsed"] = to_json(spec);
    mani.finish(out);
    std::cout << "wrote " << out << "; " << fit_note << "\n";
    return 0;
}

int cmd_cz(double q, double alpha, double gamma, std::uint64_t seed, double L, std::size_t N,
           int jcount, int kcount, const std::string& out, ManifestWriter& mani)
{
    const Grid g = make_grid(L, N);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    DoubleFamily fam;
    fam.grid = g;
    for (int j = 0; j < jcount; ++j) fam.j_labels.push_back(j);
    for (int k = 0; k < kcount; ++k) fam.k_labels.push_back(k);
    fam.functions.resize(static_cast<std::size_t>(jcount));
    for (auto& row : fam.functions) {
        for (int k = 0; k < kcount; ++k) {
            GridFunction f(g);
            for (auto& v : f.values) v = cplx{gauss(rng), gauss(rng)};
            row.push_back(std::move(f));
        }
    }

    double factor = 1.0;
    const DoubleFamily norm = normalize_family(fam, q, factor);
    const CzDecomposition dec = cz_decompose(fam, q, alpha, gamma);

    // post-hoc invariant residuals
    double reconstruction = 0.0, mean_zero = 0.0, good_bound = 0.0;
    double cube_measure = 0.0;
    for (const auto& piece : dec.bad) cube_measure += piece.cube.measure();
    for (std::size_t jj = 0; jj < norm.j_count(); ++jj) {
        for (std::size_t kk = 0; kk < norm.k_count(); ++kk) {
            GridFunction sum = dec.good.functions[jj][kk];
            for (std::size_t l = 0; l < dec.bad.size(); ++l) {
                const GridFunction b = dec.materialize_bad(norm, l, jj, kk);
                for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += b.values[i];
                cplx mass{0.0, 0.0};
                for (const auto& v : b.values) mass += v;
                mean_zero = std::max(mean_zero, std::abs(mass) * g.spacing);
            }
            reconstruction = std::max(reconstruction, max_abs_diff(sum, norm.functions[jj][kk]));
        }
    }
    {
        const auto good_norm = lq_l1_pointwise(dec.good, q);
        for (double v : good_norm) good_bound = std::max(good_bound, v);
    }

    json rep;
    rep["alpha"] = alpha;
    rep["gamma"] = gamma;
    rep["q"] = q;
    rep["normalization"] = dec.normalization;
    rep["degenerate_root"] = dec.degenerate_root;
    rep["cube_count"] = dec.bad.size();
    rep["cube_measure_total"] = cube_measure;
    rep["cube_measure_bound"] = 1.0 / (gamma * alpha);
    json cubes = json::array();
    for (const auto& piece : dec.bad)
        cubes.push_back({{"side_exp", piece.cube.side_exp}, {"offset", piece.cube.offset}});
    rep["cubes"] = cubes;
    rep["residuals"] = {{"reconstruction", reconstruction},
                        {"bad_mean_mass", mean_zero},
                        {"good_pointwise_max", good_bound},
                        {"good_bound_limit", 2.0 * gamma * alpha}};

    std::cout << rep.dump(2) << "\n";
    if (!out.empty()) {
        write_text(out, rep.dump(2) + "\n");
        mani.outputs.push_back(out);
        mani.doc["parsed"] = {{"q", q}, {"alpha", alpha}, {"gamma", gamma}, {"seed", seed}};
        mani.finish(out);
    }
    const bool ok = reconstruction <= 1e-12 && mean_zero <= 1e-12 &&
                    good_bound <= 2.0 * gamma * alpha * (1.0 + 1e-12) &&
                    cube_measure <= 1.0 / (gamma * alpha) + 1e-15;
    return ok ? 0 : 2;
}

int cmd_ay(double sigma, const std::vector<int>& K_list, int w_count, const std::string& out,
           ManifestWriter& mani)
{
    std::string csv = "y,A_y,j_lo,j_hi,w_count\n";
    char line[256];
    for (int K : K_list) {
        const double y = std::exp(static_cast<double>(K));
        double L = 1.0;
        while (L <= 4.0 * y) L *= 2.0;
        const Grid g = make_grid(L, static_cast<std::size_t>(std::llround(L * 64.0)));
        const int j_lo = -g.length_exp;
        const int j_hi = static_cast<int>(std::ceil(std::log2(4.0 * (std::exp(1.0) + y) / g.spacing))) + 1;
        const auto est = estimate_ay(y, sigma, j_lo, j_hi, log_spaced_w(g, w_count), g);
        for (const auto& w : est.warnings) std::cerr << "warning: " << w << "\n";
        std::snprintf(line, sizeof line, "%.17g,%.17g,%d,%d,%zu\n", y, est.value, est.j_lo, est.j_hi,
                      est.w_count);
        csv += line;
    }
    write_text(out, csv);
    mani.outputs.push_back(out);
    mani.doc["parsed"] = {{"sigma", sigma}, {"K_list", K_list}, {"w_count", w_count}};
    mani.finish(out);
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed)
{
    const auto checks = run_verify_suite(suite, seed);
    int failures = 0;
    for (const auto& c : checks) {
        std::printf("%-40s %s  residual=%.3e  tol=%.1e\n", c.name.c_str(), c.pass ? "PASS" : "FAIL",
                    c.residual, c.tolerance);
        if (!c.pass) ++failures;
    }
    std::printf("%zu checks, %d failure(s)\n", checks.size(), failures);
    return failures == 0 ? 0 : 2;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"shiftlab: shifted maximal/square function laboratory"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate an extremizer family");
    std::string gen_family = "A", gen_out = "family";
    int gen_K = 5, gen_spacing = 4;
    double gen_y = 0.0, gen_W = 0.0, gen_R = 0.25;
    gen->add_option("--family", gen_family, "A|B|PsiSingle|SparseModulated|SparseShifted")->required();
    gen->add_option("--K", gen_K, "sets y = e^K");
    gen->add_option("--y", gen_y, "explicit shift factor (overrides --K)");
    gen->add_option("--spacing", gen_spacing, "sparse zeta spacing (4 or 10)");
    gen->add_option("--W", gen_W, "bump frequency halfwidth (0 = family default)");
    gen->add_option("--R", gen_R, "bump floor radius");
    gen->add_option("--out", gen_out, "output prefix")->required();

    // apply
    auto* apply = app.add_subcommand("apply", "apply an operator to a function file");
    std::string ap_op = "identity", ap_in, ap_out, ap_filter = "phi";
    double ap_sigma = 2.0, ap_t = 1.0, ap_y = 0.0;
    int ap_k = 0, ap_wraps = 0;
    apply->add_option("--op", ap_op, "identity|peetre|dyadic-avg|dyadic-max|hl-max|lp-conv|lambda-conv")->required();
    apply->add_option("--in", ap_in)->required();
    apply->add_option("--out", ap_out)->required();
    apply->add_option("--sigma", ap_sigma);
    apply->add_option("--t", ap_t, "exponent t; use 'inf' via --t-inf");
    apply->add_option("--k", ap_k, "dyadic level");
    apply->add_option("--y", ap_y, "shift factor");
    apply->add_option("--filter", ap_filter, "phi|psi|psitilde");
    apply->add_option("--V", ap_wraps, "periodization wraps (0 = auto)");
    bool ap_tinf = false;
    apply->add_flag("--t-inf", ap_tinf, "use t = infinity");

    // norm
    auto* norm = app.add_subcommand("norm", "evaluate a norm functional");
    std::string nm_in, nm_family, nm_variant = "strong", nm_out;
    double nm_p = 2.0, nm_q = 2.0;
    norm->add_option("--in", nm_in, "single SHL1 function");
    norm->add_option("--family", nm_family, "family sidecar JSON");
    norm->add_option("--p", nm_p);
    norm->add_option("--q", nm_q);
    norm->add_option("--variant", nm_variant, "strong|weak-l1|carleson");
    norm->add_option("--out", nm_out, "write the report JSON here too");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "run a growth sweep from a JSON config");
    std::string sw_config, sw_out;
    int sw_jobs = 0;
    bool sw_timing = false;
    sweep->add_option("--config", sw_config)->required();
    sweep->add_option("--out", sw_out)->required();
    sweep->add_option("--jobs", sw_jobs, "max parallel sweep points");
    sweep->add_flag("--timing", sw_timing, "record wall times in the CSV (breaks byte determinism)");

    // cz
    auto* cz = app.add_subcommand("cz", "decompose a seeded random double family");
    double cz_q = 2.0, cz_alpha = 1.0, cz_gamma = 0.5, cz_L = 1.0;
    std::uint64_t cz_seed = 7;
    std::size_t cz_N = 512;
    int cz_j = 2, cz_k = 3;
    std::string cz_out;
    cz->add_option("--q", cz_q);
    cz->add_option("--alpha", cz_alpha);
    cz->add_option("--gamma", cz_gamma);
    cz->add_option("--seed", cz_seed);
    cz->add_option("--L", cz_L);
    cz->add_option("--N", cz_N);
    cz->add_option("--jcount", cz_j);
    cz->add_option("--kcount", cz_k);
    cz->add_option("--out", cz_out);

    // ay
    auto* ay = app.add_subcommand("ay", "estimate the Hormander constant A_y over a K sweep");
    double ay_sigma = 2.0;
    std::vector<int> ay_K{3, 4, 5, 6, 7, 8};
    int ay_w = 64;
    std::string ay_out;
    ay->add_option("--sigma", ay_sigma);
    ay->add_option("--K-list", ay_K, "K values; y = e^K")->delimiter(',');
    ay->add_option("--w-count", ay_w);
    ay->add_option("--out", ay_out)->required();

    // verify
    auto* verify = app.add_subcommand("verify", "run the invariant/oracle suite");
    std::string vf_suite = "all";
    std::uint64_t vf_seed = 12345;
    verify->add_option("--suite", vf_suite, "all|exact-identities|oracles");
    verify->add_option("--seed", vf_seed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            ManifestWriter mani("gen", argc, argv);
            return cmd_gen(gen_family, gen_K, gen_y, gen_spacing, gen_W, gen_R, resolve_out(gen_out), mani);
        }
        if (apply->parsed()) {
            ManifestWriter mani("apply", argc, argv);
            if (ap_tinf) ap_t = shiftlab::t_infinity;
            return cmd_apply(ap_op, ap_in, resolve_out(ap_out), ap_sigma, ap_t, ap_k, ap_y, ap_filter,
                             ap_wraps, mani);
        }
        if (norm->parsed()) {
            ManifestWriter mani("norm", argc, argv);
            return cmd_norm(nm_in, nm_family, nm_p, nm_q, nm_variant, resolve_out(nm_out), mani);
        }
        if (sweep->parsed()) {
            ManifestWriter mani("sweep", argc, argv);
            return cmd_sweep(sw_config, resolve_out(sw_out), sw_jobs, sw_timing, mani);
        }
        if (cz->parsed()) {
            ManifestWriter mani("cz", argc, argv);
            return cmd_cz(cz_q, cz_alpha, cz_gamma, cz_seed, cz_L, cz_N, cz_j, cz_k, resolve_out(cz_out), mani);
        }
        if (ay->parsed()) {
            ManifestWriter mani("ay", argc, argv);
            return cmd_ay(ay_sigma, ay_K, ay_w, resolve_out(ay_out), mani);
        }
        if (verify->parsed()) return cmd_verify(vf_suite, vf_seed);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
