#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "app/config.hpp"
#include "app/runner.hpp"
#include "seo/constants.hpp"
#include "seo/error.hpp"
#include "seo/parallel.hpp"

using namespace seo;
using namespace seo::app;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return RunConfig::parse(in, "test");
}

const char* kAdlerSweep = R"(
[run]
scenario = adler
seed = 42

[adler]
i_b = 1.5
d_noise = 0.01
duration_tau = 200
d_tau = 0.01
stride = 10

[sweep]
axis = adler.i_b
min = 0.5
max = 2.0
steps = 6
)";

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / ("seo_sync_test_" + tag)) {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("strict parsing rejects unknown or malformed entries") {
    CHECK_NOTHROW((void)parse(kAdlerSweep));
    CHECK_THROWS_AS((void)parse("[run]\nscenario = adler\n[adler]\ni_b = 1\nduration_tau = 1\nd_tau = 0.01\nib = 2\n"),
                    ConfigError);
    CHECK_THROWS_AS((void)parse("[run]\nscenario = adler\n[adlr]\ni_b = 1\n"), ConfigError);
    CHECK_THROWS_AS((void)parse("[run]\nscenario = adler\n[adler]\ni_b = 1\ni_b = 2\n"), ConfigError);
    CHECK_THROWS_AS((void)parse("[run]\nscenario = adler\n[adler]\ni_b = 1 ; comment\n"), ConfigError);
    CHECK_THROWS_AS((void)parse("[run]\nscenario = adler\n[adler]\ni_b = 1,5\n"), ConfigError);
    CHECK_THROWS_AS((void)parse("[run]\nscenario = orbit\n"), ConfigError);
    CHECK_THROWS_AS((void)parse("[run]\nscenario = adler\nseed = -3\n"), ConfigError);
    // Scenario without its block.
    CHECK_THROWS_AS((void)parse("[run]\nscenario = adler\n"), ConfigError);
    CHECK_THROWS_AS((void)parse("[run]\nscenario = spectrogram\n[spectrogram]\nsource = adler\n"), ConfigError);
}

TEST_CASE("Hz keys convert to rad/s") {
    const auto c = parse("[run]\nscenario = spectrogram\n[spectrogram]\nsource = adler\nomega_eff_hz = 236.4e3\n"
                         "omega_a_hz = 49.6\n");
    CHECK(c.real("spectrogram.omega_a") == doctest::Approx(kTwoPi * 49.6).epsilon(1e-15));
    CHECK(c.real("spectrogram.omega_eff") == doctest::Approx(kTwoPi * 236.4e3).epsilon(1e-15));
    CHECK_FALSE(c.has("spectrogram.omega_a_hz"));
    // Only angular keys take the suffix, and not both forms at once.
    CHECK_THROWS_AS((void)parse("[run]\nscenario = adler\n[adler]\ni_b_hz = 1\n"), ConfigError);
    CHECK_THROWS_AS((void)parse("[run]\nscenario = adler\n[adler]\ni_b = 1\nduration_tau = 1\nd_tau = 0.01\n"
                                "omega_a = 1\nomega_a_hz = 1\n"),
                    ConfigError);
}

TEST_CASE("sweep grids and overrides") {
    auto c = parse(kAdlerSweep);
    REQUIRE(c.sweep());
    CHECK(c.sweep()->axis == "adler.i_b");
    const auto v = c.sweep()->values();
    REQUIRE(v.size() == 6);
    CHECK(v.front() == 0.5);
    CHECK(v.back() == 2.0);
    CHECK(v[1] == doctest::Approx(0.8));

    c.apply_override("sweep.steps=1");
    CHECK(c.sweep()->values() == std::vector<double>{0.5});
    CHECK(c.overrides() == std::vector<std::string>{"sweep.steps=1"});

    c.apply_override("sweep.scale = log");
    c.apply_override("sweep.steps=3");
    CHECK(c.sweep()->values()[1] == doctest::Approx(1.0));

    CHECK_THROWS_AS(c.apply_override("adler.nope=1"), ConfigError);
    CHECK_THROWS_AS(c.apply_override("adler.i_b"), ConfigError);
    CHECK_THROWS_AS(c.apply_override("sweep.steps=0"), ConfigError);
    CHECK_THROWS_AS(c.apply_override("sweep.axis=run.scenario"), ConfigError);
    CHECK_THROWS_AS(c.apply_override("sweep.axis=adler.stride_hz"), ConfigError);

    // A swept Hz axis converts its range.
    auto s = parse("[run]\nscenario = sensitivity\n[sensitivity]\nm = 1e-12\nomega0 = 1e6\ngamma0 = 1\nt_eff = 1\n"
                   "r0 = 1e-9\nt_a = 1\n[sweep]\naxis = sensitivity.omega0_hz\nmin = 1\nmax = 2\nsteps = 2\n");
    CHECK(s.sweep()->axis == "sensitivity.omega0");
    CHECK(s.sweep()->values().back() == doctest::Approx(kTwoPi * 2.0));
}

TEST_CASE("SHA-256 of a known message") {
    TempDir dir("sha");
    fs::create_directories(dir.path);
    std::ofstream(dir.path / "abc.txt", std::ios::binary) << "abc";
    CHECK(sha256_file(dir.path / "abc.txt") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("runs are byte-identical for a fixed seed and independent of the worker count") {
    TempDir a("det_a"), b("det_b"), c("det_c");
    const auto cfg = parse(kAdlerSweep);
    set_worker_count(1);
    const auto ra = run_scenario(cfg, a.path);
    set_worker_count(4);
    const auto rb = run_scenario(cfg, b.path);
    set_worker_count(0);
    REQUIRE(ra.artifacts.size() == 1);
    CHECK(ra.points == 6);
    CHECK(slurp(a.path / "adler_summary.csv") == slurp(b.path / "adler_summary.csv"));
    CHECK(ra.artifacts[0].sha256 == rb.artifacts[0].sha256);
    CHECK(ra.artifacts[0].sha256 == sha256_file(a.path / "adler_summary.csv"));

    auto other = cfg;
    other.set_seed(43);
    (void)run_scenario(other, c.path);
    CHECK(slurp(a.path / "adler_summary.csv") != slurp(c.path / "adler_summary.csv"));

    // Header comment, column names, '.' decimals.
    std::istringstream in(slurp(a.path / "adler_summary.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("# ", 0) == 0);
    std::getline(in, line);
    CHECK(line == "adler.i_b,i_b,mean_rate,expected_rate,slips_forward,slips_backward");
    std::getline(in, line);
    CHECK(line.rfind("0.5,0.5,", 0) == 0);
}

TEST_CASE("single-point override writes the trajectory and the manifest records it") {
    TempDir dir("single");
    auto cfg = parse(kAdlerSweep);
    cfg.apply_override("sweep.steps=1");
    const auto run = run_scenario(cfg, dir.path);
    CHECK(run.points == 1);
    REQUIRE(run.artifacts.size() == 2);
    CHECK(run.artifacts[0].file == "adler.csv");
    CHECK(fs::file_size(dir.path / "adler.csv") == run.artifacts[0].bytes);

    ManifestInfo info;
    info.config_path = "inline";
    info.seed_source = "config";
    const auto m = make_manifest(cfg, run, info);
    CHECK(m["overrides"][0] == "sweep.steps=1");
    CHECK(m["seed"] == 42);
    CHECK(m["version"] == kLibraryVersion);
    CHECK(m["config"]["adler.i_b"] == "1.5");
    CHECK(m["sweep"]["steps"] == 1);
    REQUIRE(m["artifacts"].size() == 2);
    for (const auto& a : m["artifacts"])
        CHECK(a["sha256"] == sha256_file(dir.path / a["file"].get<std::string>()));
    CHECK(m.contains("wall_time_s"));
    CHECK(m.contains("rng"));
}

TEST_CASE("scenarios run end to end") {
    TempDir dir("scen");
    SUBCASE("spectrogram reports the locked band") {
        const auto cfg = parse(R"(
[run]
scenario = spectrogram
seed = 5
[spectrogram]
source = adler
omega_eff = 1000
omega_a = 1
segment_len = 1024
segments = 4
[sweep]
axis = spectrogram.detuning
min = -0.002
max = 0.002
steps = 9
)");
        const auto run = run_scenario(cfg, dir.path);
        REQUIRE(run.artifacts.size() == 2);
        CHECK(run.artifacts[1].file == "spectrogram.json");
        REQUIRE(!run.results["locked_band"].is_null());
        // |i_b| = 0, 0.5 and 1 are single lines at 0.5e-3 spacing; 1.5 is not.
        CHECK(run.results["locked_band"]["rows"] == 5);
    }
    SUBCASE("circle map staircase") {
        const auto cfg = parse("[run]\nscenario = circle-map\n[map]\nalpha = 0\nw_a = 0.9\nn_measure = 2000\n"
                               "[sweep]\naxis = map.alpha\nmin = -0.5\nmax = 0.5\nsteps = 3\n");
        const auto run = run_scenario(cfg, dir.path);
        const auto text = slurp(dir.path / "staircase.csv");
        CHECK(text.find("alpha,w_a,winding,locked_p,locked_q") != std::string::npos);
        CHECK(run.points == 3);
    }
    SUBCASE("sensitivity equals the forced-oscillator value when synchronised") {
        const auto cfg = parse("[run]\nscenario = sensitivity\n[sensitivity]\nm = 1.1e-12\nomega0_hz = 236.4e3\n"
                               "gamma0 = 50\nt_eff = 77\nr0 = 1e-8\nt_a = 1\nomega_a_hz = 49.6\ni_b = 0.5\n");
        (void)run_scenario(cfg, dir.path);
        std::istringstream in(slurp(dir.path / "sensitivity.csv"));
        std::string line;
        std::getline(in, line);
        std::getline(in, line);
        std::getline(in, line);
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        REQUIRE(f.size() == 9);
        CHECK(f[3].empty());   // no SEO rates given
        CHECK(std::stod(f[8]) == doctest::Approx(std::stod(f[1])).epsilon(1e-12));
    }
    SUBCASE("envelope above threshold settles on r0") {
        const auto cfg = parse("[run]\nscenario = envelope\n[envelope]\ngamma_big0 = -1\ngamma_big2 = 1\n"
                               "omega_big0 = 5\nduration = 40\ndt = 0.01\na0_re = 0.2\n");
        (void)run_scenario(cfg, dir.path);
        std::istringstream in(slurp(dir.path / "envelope_summary.csv"));
        std::string line;
        std::getline(in, line);
        std::getline(in, line);
        CHECK(line == "point,gamma_big0,omega_h,r0,mean_amplitude,final_amplitude,omega_est,sigma_est");
        std::getline(in, line);
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        REQUIRE(f.size() == 8);
        CHECK(std::stod(f[5]) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(std::stod(f[6]) == doctest::Approx(5.0).epsilon(1e-6));
    }
}

TEST_CASE("error classes map to exit codes") {
    CHECK(exit_code(ErrorKind::Config) == 2);
    CHECK(exit_code(ErrorKind::Parameter) == 2);
    CHECK(exit_code(ErrorKind::Precondition) == 3);
    CHECK(exit_code(ErrorKind::Divergence) == 4);
    CHECK(exit_code(ErrorKind::Io) == 5);
    // A step-guard violation surfaces as a precondition failure.
    TempDir dir("guard");
    auto cfg = parse(kAdlerSweep);
    cfg.apply_override("adler.d_tau=0.5");
    CHECK_THROWS_AS((void)run_scenario(cfg, dir.path), PreconditionError);
}

}  // TEST_SUITE
