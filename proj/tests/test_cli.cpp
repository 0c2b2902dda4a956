#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bmera/channels.hpp"
#include "bmera/network.hpp"
#include "bmera/rng.hpp"
#include "bmera/spectral.hpp"
#include "support.hpp"

using namespace bmera;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& cmd, const std::string& cfg_path, const std::string& out_dir) {
    const std::string full = std::string(BMERA_CLI_PATH) + " " + cmd + " --config " + cfg_path +
                             " --out " + out_dir + " 2>cli_stderr.txt";
    const int rc = std::system(full.c_str());
    return WEXITSTATUS(rc);
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    os << text;
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path p;
    explicit TempDir(const std::string& name) : p(fs::path("cli_scratch") / name) {
        fs::remove_all(p);
        fs::create_directories(p);
    }
};

} // namespace

TEST_CASE("check passes on fresh random tensors and fails on corrupted ones") {
    TempDir td("check");
    const std::string cfg = (td.p / "run.cfg").string();
    write_file(cfg, "[run]\nd = 2\nm = 2\nseed = 42\n");
    CHECK(run_cli("check", cfg, (td.p / "out").string()) == 0);

    // corrupt the renormalizer and point the config at the saved container
    MeraConfig mc;
    mc.d = 2;
    mc.m = 2;
    mc.seed = 42;
    MeraTensors t = random_isometric(mc);
    Rng rng(5);
    for (std::int64_t i = 0; i < t.lambda.size(); ++i) t.lambda[i] += 1e-3 * rng.cgauss();
    const std::string bad = (td.p / "bad.bin").string();
    save_tensors(t, bad);
    const std::string cfg2 = (td.p / "bad.cfg").string();
    write_file(cfg2, "[run]\nd = 2\nm = 2\nseed = 42\n[check]\ntensors = " + bad + "\n");
    CHECK(run_cli("check", cfg2, (td.p / "out2").string()) == 2);
    const std::string report = read_file((td.p / "out2" / "check.csv").string());
    CHECK(report.find("lambda") != std::string::npos);
    // the lambda row is the failing one
    std::istringstream is(report);
    std::string line;
    bool lambda_failed = false;
    while (std::getline(is, line))
        if (line.rfind("lambda,", 0) == 0 && line.back() == '0') lambda_failed = true;
    CHECK(lambda_failed);
}

TEST_CASE("an impossible tolerance fails every tensor") {
    TempDir td("tol");
    const std::string cfg = (td.p / "run.cfg").string();
    write_file(cfg, "[run]\nd = 2\nm = 2\nseed = 7\n[check]\ntolerance = 1e-20\n");
    CHECK(run_cli("check", cfg, (td.p / "out").string()) == 2);
}

TEST_CASE("spectrum outputs are byte-identical across reruns") {
    TempDir td("spec");
    const std::string cfg = (td.p / "run.cfg").string();
    write_file(cfg, "[run]\nd = 2\nm = 2\nseed = 11\n[spectrum]\ntwopoint = false\n");
    CHECK(run_cli("spectrum", cfg, (td.p / "a").string()) == 0);
    CHECK(run_cli("spectrum", cfg, (td.p / "b").string()) == 0);
    for (const char* name : {"spectrum_DL.csv", "spectrum_DR.csv", "spectrum_D.csv",
                             "spectrum_BL.csv", "spectrum_BR.csv"}) {
        const std::string a = read_file((td.p / "a" / name).string());
        const std::string b = read_file((td.p / "b" / name).string());
        CHECK(!a.empty());
        CHECK(a == b);
    }
}

TEST_CASE("profile of a scaling operator reports its exponent") {
    TempDir td("prof");
    const std::string cfg = (td.p / "run.cfg").string();
    write_file(cfg, "[run]\nd = 2\nm = 2\nseed = 42\n[operator]\ntype = scaling\nindex = 0\n"
                    "[profile]\nk_lo = 2\nk_hi = 8\n");
    CHECK(run_cli("profile", cfg, (td.p / "out").string()) == 0);
    const std::string body = read_file((td.p / "out" / "profile.csv").string());
    // parse the exponent from the header
    const auto pos = body.find("exponent=");
    REQUIRE(pos != std::string::npos);
    const double exponent = std::strtod(body.c_str() + pos + 9, nullptr);
    // library-side reference
    MeraConfig mc;
    mc.d = 2;
    mc.m = 2;
    mc.seed = 42;
    const MeraTensors t = random_isometric(mc);
    const BoundaryChannels ch = build_channels(t);
    const auto ops = spectral::scaling_operators(ch.davg, 1);
    REQUIRE(!ops.empty());
    CHECK(std::abs(exponent - ops[0].exponent) <= 1e-8);
}

TEST_CASE("exact at n=2 stays within tolerance and exits zero") {
    TempDir td("exact");
    const std::string cfg = (td.p / "run.cfg").string();
    write_file(cfg, "[run]\nd = 2\nm = 2\nseed = 42\n[exact]\nn = 2\n");
    CHECK(run_cli("exact", cfg, (td.p / "out").string()) == 0);
    const std::string body = read_file((td.p / "out" / "exact.csv").string());
    const auto pos = body.find("max_discrepancy=");
    REQUIRE(pos != std::string::npos);
    const double worst = std::strtod(body.c_str() + pos + 16, nullptr);
    CHECK(worst <= 1e-10);
}

TEST_CASE("energy table carries the divergence flag") {
    TempDir td("energy");
    // scan a few seeds for both flag values, through the CLI
    bool saw_flagged = false, saw_unflagged = false;
    for (std::uint64_t seed = 1; seed <= 8 && !(saw_flagged && saw_unflagged); ++seed) {
        const std::string cfg = (td.p / ("run" + std::to_string(seed) + ".cfg")).string();
        write_file(cfg, "[run]\nd = 2\nm = 2\nseed = " + std::to_string(seed) +
                            "\n[energy]\ntau = 4\n");
        const std::string out = (td.p / ("out" + std::to_string(seed))).string();
        CHECK(run_cli("energy", cfg, out) == 0);
        const std::string body = read_file(out + "/energy.csv");
        std::istringstream is(body);
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty() || line[0] == '#') continue;
            if (line.back() == '1') saw_flagged = true;
            if (line.back() == '0') saw_unflagged = true;
        }
    }
    CHECK(saw_flagged);
    CHECK(saw_unflagged);
}

TEST_CASE("optimize writes a resumable checkpoint and deterministic trace") {
    TempDir td("opt");
    const std::string cfg = (td.p / "run.cfg").string();
    write_file(cfg, "[run]\nd = 2\nm = 2\nseed = 3\n[optimize]\nsweeps = 2\nepsilon = 0.35\n"
                    "checkpoint = ck.bin\n");
    CHECK(run_cli("optimize", cfg, (td.p / "a").string()) == 0);
    CHECK(run_cli("optimize", cfg, (td.p / "b").string()) == 0);
    CHECK(read_file((td.p / "a" / "optimize_trace.csv").string()) ==
          read_file((td.p / "b" / "optimize_trace.csv").string()));
    CHECK(fs::exists(td.p / "a" / "ck.bin"));
    // resume continues the trace
    const std::string cfg2 = (td.p / "resume.cfg").string();
    write_file(cfg2, "[run]\nd = 2\nm = 2\nseed = 3\n[optimize]\nsweeps = 1\nepsilon = 0.35\n"
                     "checkpoint = ck2.bin\nresume = " + (td.p / "a" / "ck.bin").string() + "\n");
    CHECK(run_cli("optimize", cfg2, (td.p / "c").string()) == 0);
    const std::string body = read_file((td.p / "c" / "optimize_trace.csv").string());
    int rows = 0;
    std::istringstream is(body);
    std::string line;
    while (std::getline(is, line))
        if (!line.empty() && line[0] != '#') ++rows;
    CHECK(rows == 3);
}

TEST_CASE("config schema rejects unknown keys and sections") {
    TempDir td("schema");
    const std::string cfg = (td.p / "bad.cfg").string();
    write_file(cfg, "[run]\nd = 2\nwat = 3\n");
    CHECK(run_cli("check", cfg, (td.p / "out").string()) == 1);
    write_file(cfg, "[nonsense]\nx = 1\n");
    CHECK(run_cli("check", cfg, (td.p / "out").string()) == 1);
}

TEST_CASE("spectrum with the doubled map verifies the product structure" *
          doctest::timeout(1200)) {
    TempDir td("spec_dd");
    const std::string cfg = (td.p / "run.cfg").string();
    write_file(cfg, "[run]\nd = 2\nm = 2\nseed = 5\n[spectrum]\ntwopoint = true\n");
    CHECK(run_cli("spectrum", cfg, (td.p / "out").string()) == 0);
    const std::string body = read_file((td.p / "out" / "spectrum_DD.csv").string());
    REQUIRE(!body.empty());
    const auto pos = body.find("product_check_max_dist=");
    REQUIRE(pos != std::string::npos);
    const double dist = std::strtod(body.c_str() + pos + 23, nullptr);
    CHECK(dist <= 1e-8);
    // 4096 eigenvalue lines follow the headers
    int lines = 0;
    std::istringstream is(body);
    std::string line;
    while (std::getline(is, line))
        if (!line.empty() && line[0] != '#') ++lines;
    CHECK(lines == 4096);
}
