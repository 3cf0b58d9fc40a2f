#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace seo::verify {

std::string num(double v, int digits) {
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

Report::Report(std::string id, std::string title, double budget_seconds) : start_(std::chrono::steady_clock::now()) {
    r_.id = std::move(id);
    r_.title = std::move(title);
    r_.budget_seconds = budget_seconds;
}

void Report::near(const std::string& label, double measured, double expected, double abs_tol) {
    const bool ok = std::abs(measured - expected) <= abs_tol;
    r_.items.push_back({label, ok, num(measured) + " vs " + num(expected) + " +/- " + num(abs_tol, 3)});
}

void Report::rel(const std::string& label, double measured, double expected, double rel_tol) {
    const double err = std::abs(measured - expected) / std::abs(expected);
    const bool ok = err <= rel_tol;
    r_.items.push_back({label, ok, num(measured) + " vs " + num(expected) + " (rel err " + num(err, 3) +
                                       ", tol " + num(rel_tol, 3) + ")"});
}

void Report::within(const std::string& label, double measured, double lo, double hi) {
    const bool ok = measured >= lo && measured <= hi;
    r_.items.push_back({label, ok, num(measured) + " in [" + num(lo) + ", " + num(hi) + "]"});
}

void Report::below(const std::string& label, double measured, double limit) {
    r_.items.push_back({label, measured < limit, num(measured, 3) + " < " + num(limit, 3)});
}

void Report::truth(const std::string& label, bool ok, const std::string& detail) {
    r_.items.push_back({label, ok, detail});
}

void Report::note(const std::string& label, const std::string& detail) { r_.items.push_back({label, true, detail}); }

CheckResult Report::finish() {
    r_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (r_.budget_seconds > 0.0)
        r_.items.push_back({"runtime", r_.seconds < r_.budget_seconds,
                            num(r_.seconds, 3) + " s < " + num(r_.budget_seconds, 3) + " s"});
    r_.passed = !r_.items.empty();
    for (const auto& it : r_.items) r_.passed = r_.passed && it.passed;
    return r_;
}

const CheckItem* CheckResult::headline() const {
    for (const auto& it : items)
        if (!it.passed) return &it;
    return items.empty() ? nullptr : &items.front();
}

void print_line(std::ostream& os, const CheckResult& r) {
    os << (r.passed ? "PASS" : "FAIL") << "  " << std::left << std::setw(4) << r.id << ' ' << r.title << "  ["
       << std::fixed << std::setprecision(1) << r.seconds << " s]";
    os.unsetf(std::ios::floatfield);
    if (const auto* h = r.headline()) os << "  " << h->label << ": " << h->detail;
    os << '\n';
}

void print_details(std::ostream& os, const CheckResult& r) {
    for (const auto& it : r.items) os << "      " << (it.passed ? "ok  " : "FAIL") << "  " << it.label << ": " << it.detail << '\n';
}

}  // namespace seo::verify
