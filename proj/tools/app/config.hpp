#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace seo::app {

enum class Scenario { Envelope, Full, Adler, CircleMap, Spectrogram, Sensitivity };

[[nodiscard]] std::string scenario_name(Scenario s);

struct SweepSpec {
    std::string axis;      // "section.key" of the swept parameter
    double min = 0.0;
    double max = 0.0;
    std::size_t steps = 1;
    bool log_scale = false;

    [[nodiscard]] std::vector<double> values() const;
};

// INI run configuration with a fixed schema: unknown sections or keys are
// errors. Keys documented as angular frequencies (rad/s) may instead be
// given as <key>_hz and are stored converted, multiplied by 2 pi.
class RunConfig {
public:
    static RunConfig parse(std::istream& is, const std::string& origin = "<config>");
    static RunConfig load(const std::filesystem::path& path);

    // "section.key=value", validated like a file entry and recorded.
    void apply_override(const std::string& assignment);
    // Replaces the seed, e.g. from the environment.
    void set_seed(std::uint64_t seed) { seed_ = seed; }

    [[nodiscard]] Scenario scenario() const noexcept { return scenario_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] const std::optional<SweepSpec>& sweep() const noexcept { return sweep_; }
    [[nodiscard]] std::optional<std::string> output_dir() const;
    [[nodiscard]] const std::vector<std::string>& overrides() const noexcept { return overrides_; }
    // Resolved parameter entries, "section.key" -> text (angular keys in rad/s).
    [[nodiscard]] const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

    [[nodiscard]] bool has(const std::string& key) const;
    [[nodiscard]] bool has_section(const std::string& section) const;
    // Typed accessors; a malformed value is a ConfigError naming the key.
    [[nodiscard]] double real(const std::string& key) const;   // required
    [[nodiscard]] double real(const std::string& key, double fallback) const;
    [[nodiscard]] std::size_t count(const std::string& key, std::size_t fallback) const;
    [[nodiscard]] bool flag(const std::string& key, bool fallback) const;
    [[nodiscard]] std::string text(const std::string& key, const std::string& fallback) const;

    // Copy with one numeric parameter replaced (sweep points).
    [[nodiscard]] RunConfig with(const std::string& key, double value) const;

private:
    void assign(const std::string& section, const std::string& key, const std::string& value, const std::string& where);
    void finalize();

    Scenario scenario_ = Scenario::Adler;
    std::uint64_t seed_ = 0;
    std::optional<SweepSpec> sweep_;
    std::map<std::string, std::string> entries_;
    std::vector<std::string> overrides_;
};

// Locale-independent parsing of a whole token.
[[nodiscard]] double parse_real(const std::string& text, const std::string& key);
[[nodiscard]] std::uint64_t parse_seed(const std::string& text, const std::string& what);

}  // namespace seo::app
