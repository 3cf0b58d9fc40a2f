#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "app/config.hpp"
#include "app/runner.hpp"
#include "seo/error.hpp"
#include "seo/parallel.hpp"
#include "seo/verify.hpp"

namespace {

// One JSON line on stderr so wrappers can dispatch on the category.
int report_error(seo::ErrorKind kind, const std::string& message) {
    const int code = seo::app::exit_code(kind);
    nlohmann::json j{{"error", std::string(seo::to_string(kind))}, {"message", message}, {"exit_code", code}};
    std::cerr << j.dump() << '\n';
    return code;
}

std::optional<std::uint64_t> env_seed() {
    const char* v = std::getenv("SEO_SYNC_SEED");
    if (!v || !*v) return std::nullopt;
    return seo::app::parse_seed(v, "SEO_SYNC_SEED");
}

int do_run(const std::string& config_path, const std::vector<std::string>& overrides, const std::string& out_flag) {
    const auto start = std::chrono::steady_clock::now();
    auto cfg = seo::app::RunConfig::load(config_path);
    for (const auto& o : overrides) cfg.apply_override(o);
    std::string seed_source = cfg.has("run.seed") ? "config" : "default";
    if (const auto s = env_seed()) {
        cfg.set_seed(*s);
        seed_source = "environment";
    }
    const std::filesystem::path out = !out_flag.empty() ? out_flag : cfg.output_dir().value_or("out");
    auto run = seo::app::run_scenario(cfg, out);

    seo::app::ManifestInfo info;
    info.config_path = config_path;
    info.seed_source = seed_source;
    info.jobs = seo::worker_count();
    info.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto manifest = seo::app::make_manifest(cfg, run, info);
    std::ofstream mf(out / "manifest.json", std::ios::binary | std::ios::trunc);
    if (!mf) throw seo::Error(seo::ErrorKind::Io, "cannot write " + (out / "manifest.json").string());
    mf << manifest.dump(2) << '\n';

    std::cout << seo::app::scenario_name(cfg.scenario()) << ": " << run.points << " point(s), "
              << run.artifacts.size() << " artifact(s) in " << out.string() << '\n';
    for (const auto& a : run.artifacts) std::cout << "  " << a.file << "  " << a.sha256 << '\n';
    if (!run.results.empty()) std::cout << "  results " << run.results.dump() << '\n';
    return 0;
}

int do_verify(const std::string& suite, bool fast) {
    seo::verify::VerifyOptions opts;
    opts.fast = fast;
    if (const auto s = env_seed()) opts.seed = *s;
    std::size_t failed = 0, total = 0;
    seo::verify::run_suite(suite, opts, [&](const seo::verify::CheckResult& r) {
        seo::verify::print_line(std::cout, r);
        seo::verify::print_details(std::cout, r);
        std::cout.flush();
        ++total;
        failed += r.passed ? 0 : 1;
    });
    std::cout << suite << ": " << (total - failed) << " of " << total << " checks passed\n";
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-excited oscillator synchronisation simulator", "seo-sync"};
    app.require_subcommand(1);
    int jobs = 0;
    app.add_option("--jobs", jobs, "Worker threads for sweeps (default: all cores)")->check(CLI::NonNegativeNumber);

    auto* run = app.add_subcommand("run", "Run the scenario described by a config file");
    std::string config_path, config_pos, out_dir;
    std::vector<std::string> overrides;
    run->add_option("config_file", config_pos, "Config file (same as --config)");
    run->add_option("--config", config_path, "Config file");
    run->add_option("--override", overrides, "section.key=value, repeatable")->allow_extra_args(false);
    run->add_option("--out", out_dir, "Output directory (overrides run.output_dir)");
    run->add_option("--jobs", jobs, "Worker threads for sweeps")->check(CLI::NonNegativeNumber);

    auto* ver = app.add_subcommand("verify", "Run a verification suite");
    std::string suite;
    bool fast = false;
    ver->add_option("suite", suite, "analytic | monte-carlo | crossmodule | squareroot")->required();
    ver->add_flag("--fast", fast, "Reduced samples with widened statistical tolerances");
    ver->add_option("--jobs", jobs, "Worker threads")->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return report_error(seo::ErrorKind::Config, e.what());
    }

    try {
        seo::set_worker_count(jobs);
        if (*run) {
            if (!config_path.empty() && !config_pos.empty() && config_path != config_pos)
                throw seo::ConfigError("config given both positionally and with --config");
            const std::string path = config_path.empty() ? config_pos : config_path;
            if (path.empty()) throw seo::ConfigError("run needs a config file");
            return do_run(path, overrides, out_dir);
        }
        return do_verify(suite, fast);
    } catch (const seo::Error& e) {
        return report_error(e.kind(), e.what());
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", "internal"}, {"message", e.what()}, {"exit_code", 1}}.dump() << '\n';
        return 1;
    }
}
