#include <catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "shiftlab/io.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args)
{
    const std::string cmd = std::string(SHIFTLAB_BIN) + " " + args + " 2>&1";
    RunResult r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), p)) r.output.append(buf.data(), n);
    const int status = pclose(p);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path work_dir()
{
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "shiftlab_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) { return shiftlab::read_text(p.string()); }

} // namespace

TEST_CASE("gen then apply identity reproduces the file byte for byte")
{
    const auto dir = work_dir();
    const auto prefix = (dir / "famA").string();
    const auto r = run("gen --family A --K 4 --out " + prefix);
    REQUIRE(r.exit_code == 0);
    REQUIRE(fs::exists(prefix + ".k01.shl1"));
    REQUIRE(fs::exists(prefix + ".family.json"));
    REQUIRE(fs::exists(prefix + ".manifest.json"));

    const auto out = (dir / "roundtrip.shl1").string();
    const auto r2 = run("apply --op identity --in " + prefix + ".k02.shl1 --out " + out);
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp(prefix + ".k02.shl1") == slurp(out));
}

TEST_CASE("manifest echoes the raw command line")
{
    const auto dir = work_dir();
    const auto prefix = (dir / "famEcho").string();
    REQUIRE(run("gen --family A --K 3 --y 22.75 --out " + prefix).exit_code == 0);
    const auto mani = nlohmann::json::parse(slurp(prefix + ".manifest.json"));
    const auto argv = mani.at("argv").get<std::vector<std::string>>();
    bool found = false;
    for (const auto& a : argv) found = found || a == "22.75";
    CHECK(found);
    CHECK(mani.contains("wall_seconds"));
    CHECK(mani.at("parsed").at("y").get<double>() == 22.75);
}

TEST_CASE("norm subcommand prints a report")
{
    const auto dir = work_dir();
    const auto prefix = (dir / "famN").string();
    REQUIRE(run("gen --family PsiSingle --K 3 --out " + prefix).exit_code == 0);
    const auto r = run("norm --in " + prefix + ".shl1 --p 2 --variant strong");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.output);
    CHECK(j.at("value").get<double>() > 0.0);
    CHECK(j.at("spec").at("variant").get<std::string>() == "strong");

    // family-level mixed norm through the sidecar
    const auto prefixA = (dir / "famM").string();
    REQUIRE(run("gen --family A --K 4 --out " + prefixA).exit_code == 0);
    const auto rf = run("norm --family " + prefixA + ".family.json --p 1 --q 2 --variant strong");
    REQUIRE(rf.exit_code == 0);
    CHECK(nlohmann::json::parse(rf.output).at("value").get<double>() > 0.0);
}

TEST_CASE("sweep subcommand writes CSV plus fit footer, deterministically")
{
    const auto dir = work_dir();
    const auto cfg = dir / "sweep.json";
    shiftlab::SweepSpec sp;
    sp.family = shiftlab::FamilyId::A;
    sp.p = 1.0;
    sp.q = 2.0;
    sp.t = 1.0;
    sp.sigma = 2.0;
    sp.K_list = {3, 4, 5};
    sp.lhs_transform = shiftlab::TransformKind::Peetre;
    shiftlab::write_text(cfg.string(), shiftlab::to_json(sp).dump(2));

    const auto csv1 = (dir / "run1.csv").string();
    const auto csv2 = (dir / "run2.csv").string();
    REQUIRE(run("sweep --config " + cfg.string() + " --out " + csv1).exit_code == 0);
    REQUIRE(run("sweep --config " + cfg.string() + " --out " + csv2).exit_code == 0);
    const std::string a = slurp(csv1);
    CHECK(a.substr(0, a.find('\n')) == "y,K,lhs,rhs,ratio,seconds");
    CHECK(a == slurp(csv2));
    CHECK(fs::exists(csv1 + ".fit.json"));
    const auto fit = nlohmann::json::parse(slurp(csv1 + ".fit.json"));
    CHECK(fit.at("points").get<int>() == 3);
}

TEST_CASE("verify subcommand gates on failures")
{
    CHECK(run("verify --suite exact-identities").exit_code == 0);
    CHECK(run("verify --suite nonsense").exit_code == 1);
}

TEST_CASE("cz and ay subcommands run end to end")
{
    const auto dir = work_dir();
    const auto rep = (dir / "cz.json").string();
    const auto r = run("cz --q 2 --alpha 1 --gamma 0.5 --seed 7 --N 256 --out " + rep);
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(slurp(rep));
    CHECK(j.at("residuals").at("reconstruction").get<double>() < 1e-12);

    const auto ay = (dir / "ay.csv").string();
    const auto r2 = run("ay --sigma 2 --K-list 3,4 --w-count 16 --out " + ay);
    REQUIRE(r2.exit_code == 0);
    const std::string body = slurp(ay);
    CHECK(body.substr(0, body.find('\n')) == "y,A_y,j_lo,j_hi,w_count");
}

TEST_CASE("usage and file errors exit with code 1")
{
    const auto dir = work_dir();
    const auto junk = dir / "junk.shl1";
    shiftlab::write_text(junk.string(), "NOPE not a function file");
    const auto r = run("apply --op identity --in " + junk.string() + " --out " + (dir / "x.shl1").string());
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("magic") != std::string::npos);

    CHECK(run("gen --family A --K 4 --out " + (dir / "z").string() + " --bogus-flag").exit_code != 0);
    CHECK(run("apply --op warp --in " + junk.string() + " --out x").exit_code == 1);
}
