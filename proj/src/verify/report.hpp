#pragma once

#include <chrono>
#include <string>

#include "seo/verify.hpp"

namespace seo::verify {

// Collects the items of one check and times it.
class Report {
public:
    Report(std::string id, std::string title, double budget_seconds);

    void near(const std::string& label, double measured, double expected, double abs_tol);
    void rel(const std::string& label, double measured, double expected, double rel_tol);
    void within(const std::string& label, double measured, double lo, double hi);
    void below(const std::string& label, double measured, double limit);
    void truth(const std::string& label, bool ok, const std::string& detail);
    // Informational item; never fails.
    void note(const std::string& label, const std::string& detail);

    [[nodiscard]] CheckResult finish();

private:
    CheckResult r_;
    std::chrono::steady_clock::time_point start_;
};

[[nodiscard]] std::string num(double v, int digits = 5);

}  // namespace seo::verify
