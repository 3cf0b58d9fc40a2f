#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "app/config.hpp"
#include "seo/error.hpp"

namespace seo::app {

struct Artifact {
    std::string file;     // relative to the output directory
    std::string sha256;   // hex digest of the file contents
    std::uintmax_t bytes = 0;
};

struct RunResult {
    std::vector<Artifact> artifacts;
    nlohmann::json results = nlohmann::json::object();   // scenario headline numbers
    std::size_t points = 0;
};

// Executes the configured scenario, writing CSV artifacts into `out_dir`.
// Sweep points run in parallel with seeds derive_seed(seed, index); rows are
// gathered by index so artifacts do not depend on the worker count.
[[nodiscard]] RunResult run_scenario(const RunConfig& cfg, const std::filesystem::path& out_dir);

[[nodiscard]] std::string sha256_file(const std::filesystem::path& path);

// Exit status per failure class: 2 config, 3 precondition, 4 divergence, 5 I/O.
[[nodiscard]] int exit_code(ErrorKind kind) noexcept;

struct ManifestInfo {
    std::string config_path;
    std::string seed_source;   // "config", "environment" or "default"
    double wall_seconds = 0.0;
    int jobs = 0;
};

// manifest.json content: config echo, overrides, seed, version, RNG, wall
// time and every artifact with its SHA-256.
[[nodiscard]] nlohmann::json make_manifest(const RunConfig& cfg, const RunResult& run, const ManifestInfo& info);

}  // namespace seo::app
