#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace seo::verify {

struct CheckItem {
    std::string label;
    bool passed = false;
    std::string detail;   // measured vs expected with tolerance
};

struct CheckResult {
    std::string id;        // e.g. "C4" or "adler-fourier"
    std::string title;
    bool passed = false;
    double seconds = 0.0;
    double budget_seconds = 0.0;   // 0 when unbounded
    std::vector<CheckItem> items;

    // First failing item, or the first item when everything passed.
    [[nodiscard]] const CheckItem* headline() const;
};

struct VerifyOptions {
    bool fast = false;             // fewer samples, widened statistical tolerances
    std::uint64_t seed = 20240611;
};

using ResultSink = std::function<void(const CheckResult&)>;

[[nodiscard]] std::vector<std::string> suite_names();
// Throws ConfigError for an unknown suite.
std::vector<CheckResult> run_suite(const std::string& suite, const VerifyOptions& opts, const ResultSink& sink = {});
// The ten numbered acceptance criteria, in order.
std::vector<CheckResult> run_acceptance(const VerifyOptions& opts, const ResultSink& sink = {});

void print_line(std::ostream& os, const CheckResult& r);
void print_details(std::ostream& os, const CheckResult& r);

}  // namespace seo::verify
