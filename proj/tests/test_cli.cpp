#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lsavg/cli.hpp"

using namespace lsavg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("lsavg_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "run.cfg";
    std::ofstream(p) << text;
    return p;
}

int run_cli(const std::string& sub, const fs::path& cfg, const fs::path& out, std::string* log = nullptr) {
    cli::Options o;
    o.subcommand = sub;
    o.configPath = cfg.string();
    o.outDir = out.string();
    std::ostringstream os, err;
    const int rc = cli::run(o, os, err);
    if (log) *log = os.str() + err.str();
    return rc;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json manifest(const fs::path& dir, const std::string& sub) {
    std::ifstream in(dir / (sub + ".manifest.json"));
    return nlohmann::json::parse(in);
}

const std::string kCusp =
    "spec.kind = cusp\nspec.alpha = 3\nspec.n = 2\nz0 = 0.8,0\ns_grid = 1, 1.5, 2, 2.5, 3\n"
    "h_list = 1/64, 1/128, 1/256\ntruncations = 0.55, 0.4125, 0.309375, 0.23203125, 0.1740234375\n";

}  // namespace

TEST_CASE("config parsing and schema") {
    const cli::Config c = cli::Config::parse("# comment\nh = 1/64  # trailing\nz0 = 0.5, 0.5\ns_grid = 1,2\n");
    CHECK(c.real("h") == 1.0 / 64);
    CHECK(c.point("z0")[1] == 0.5);
    CHECK(c.reals("s_grid") == std::vector<double>{1, 2});
    CHECK_NOTHROW(c.check_schema());
    CHECK_THROWS_AS(cli::Config::parse("h = 1\nh = 2\n"), InvalidArgument);
    CHECK_THROWS_AS(cli::Config::parse("just words\n"), InvalidArgument);
    CHECK_THROWS_AS(cli::Config::parse("hh = 1\n").check_schema(), InvalidArgument);
}

TEST_CASE("FNV-1a reference values") {
    CHECK(cli::fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(cli::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    const cli::Config c = cli::Config::parse("h = 1\n");
    CHECK(cli::config_hash(c, 1) != cli::config_hash(c, 2));
}

TEST_CASE("scan on the cusp reports the bracket [1.5, 2.5]") {
    const fs::path dir = scratch("scan");
    const fs::path cfg = write_config(dir, kCusp);
    CHECK(run_cli("scan", cfg, dir / "out") == cli::Ok);
    const auto m = manifest(dir / "out", "scan");
    CHECK(m["summary"]["bracket"][0].get<double>() == 1.5);
    CHECK(m["summary"]["bracket"][1].get<double>() == 2.5);
    CHECK(m["version"] == cli::kVersion);
    CHECK(m["wall_time_s"].get<double>() >= 0.0);
}

TEST_CASE("reruns reproduce artifacts byte for byte") {
    const fs::path dir = scratch("repro");
    const fs::path cfg = write_config(dir, kCusp + "weight.kind = power\nweight.center = 0.8,0\nweight.beta = 0.5\n"
                                                   "r = 2\nn_balls = 50\nh = 1/128\ns = 2\n");
    for (const std::string sub : {"sweep", "whitney", "integrate"}) {
        REQUIRE(run_cli(sub, cfg, dir / "a") != cli::Error);
        REQUIRE(run_cli(sub, cfg, dir / "b") != cli::Error);
    }
    int compared = 0;
    for (const auto& e : fs::directory_iterator(dir / "a")) {
        if (e.path().extension() == ".json") continue;
        CHECK(slurp(e.path()) == slurp(dir / "b" / e.path().filename()));
        ++compared;
    }
    CHECK(compared >= 3);
    CHECK(manifest(dir / "a", "integrate")["summary"]["ar_estimate"] ==
          manifest(dir / "b", "integrate")["summary"]["ar_estimate"]);
}

TEST_CASE("tubes on rooms and halls issues a certificate") {
    const fs::path dir = scratch("tubes");
    CHECK(run_cli("tubes", write_config(dir, "tubes.family = rooms\ntubes.jmax = 8\ns = 1\n"), dir / "out") ==
          cli::Ok);
    CHECK(fs::exists(dir / "out" / "tubes.s1.certificate.txt"));
    const fs::path d2 = scratch("tubes_refused");
    CHECK(run_cli("tubes", write_config(d2, "tubes.family = cusp\ntubes.alpha = 3\ntubes.jmax = 10\ns = 1\n"),
                  d2 / "out") == cli::Refused);
}

TEST_CASE("solve with z0 outside the domain is an error") {
    const fs::path dir = scratch("solve");
    std::string log;
    CHECK(run_cli("solve", write_config(dir, "spec.kind = unitcube\nspec.n = 2\nh = 1/32\nz0 = 1.5,0.5\n"),
                  dir / "out", &log) == cli::Error);
    CHECK(log.find("outside") != std::string::npos);
    CHECK(run_cli("solve", write_config(dir, "spec.kind = teapot\nh = 1/32\nz0 = 0.5,0.5\n"), dir / "out") ==
          cli::Error);
    CHECK(run_cli("solve", write_config(dir, "spec.kind = unitcube\nh = 1/32\nz0 = 0.5,0.5\nbogus = 1\n"),
                  dir / "out") == cli::Error);
}

TEST_CASE("inconclusive sweep exits with 2") {
    const fs::path dir = scratch("sweep2");
    const std::string cfg =
        "spec.kind = cusp\nspec.alpha = 3\nz0 = 0.8,0\ns = 2\nh_list = 1/64\ntruncations = 0.5, 0.3\n";
    CHECK(run_cli("sweep", write_config(dir, cfg), dir / "out") == cli::Inconclusive);
}

TEST_CASE("other subcommands") {
    const fs::path dir = scratch("misc");
    CHECK(run_cli("rasterize", write_config(dir, "spec.kind = unitcube\nh = 1/8\n"), dir / "r") == cli::Ok);
    CHECK(run_cli("poincare", write_config(dir, "poincare.j = 2,3\npoincare.p = 2\nh = 1/256\n"), dir / "p") ==
          cli::Ok);
    CHECK(slurp(dir / "p" / "poincare.csv").rfind("j,p,truncated_j", 0) == 0);
    std::ifstream in(LSAVG_CONFIGS "/union_squares.cfg");
    CHECK(run_cli("union", LSAVG_CONFIGS "/union_squares.cfg", dir / "u") == cli::Ok);
    CHECK(fs::exists(dir / "u" / "union.step2.csv"));
}

TEST_CASE("report refuses mismatched config hashes") {
    const fs::path dir = scratch("report");
    const fs::path a = write_config(dir, "spec.kind = unitcube\nh = 1/8\nz0 = 0.5,0.5\n");
    CHECK(run_cli("rasterize", a, dir / "out") == cli::Ok);
    CHECK(run_cli("solve", a, dir / "out") == cli::Ok);
    CHECK(run_cli("report", a, dir / "out") == cli::Ok);
    CHECK(manifest(dir / "out", "report")["summary"]["runs"].size() == 2);

    std::ofstream(dir / "other.cfg") << "spec.kind = unitcube\nh = 1/16\nz0 = 0.5,0.5\n";
    CHECK(run_cli("solve", dir / "other.cfg", dir / "out") == cli::Ok);
    std::string log;
    CHECK(run_cli("report", a, dir / "out", &log) == cli::Error);
    CHECK(log.find("refusing") != std::string::npos);
}

TEST_CASE("executable exit codes") {
    const std::string tool = LSAVG_TOOL;
    CHECK(std::system((tool + " --help > /dev/null").c_str()) == 0);
    CHECK(WEXITSTATUS(std::system((tool + " frobnicate > /dev/null 2>&1").c_str())) == 1);
    const fs::path dir = scratch("exe");
    const std::string cmd = tool + " --config " + LSAVG_CONFIGS "/square_solve.cfg --out " + (dir / "o").string() +
                            " --threads 2 solve > /dev/null";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
}
