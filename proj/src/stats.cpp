#include "seo/stats.hpp"

#include <cmath>

#include "seo/error.hpp"

namespace seo::stats {

double mean(std::span<const double> v) {
    if (v.empty()) throw PreconditionError("mean of empty sample");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
    if (v.size() < 2) throw PreconditionError("variance needs at least two samples");
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

double stddev(std::span<const double> v) { return std::sqrt(variance(v)); }

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw PreconditionError("fit_line: need >= 2 paired points");
    const double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw PreconditionError("fit_line: degenerate abscissae");
    const double slope = sxy / sxx;
    const double r2 = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
    return {slope, my - slope * mx, r2};
}

double uniform_slope(std::span<const double> y, double dx) {
    const std::size_t n = y.size();
    if (n < 2) throw PreconditionError("uniform_slope: need >= 2 samples");
    const double xm = 0.5 * static_cast<double>(n - 1);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dxi = static_cast<double>(i) - xm;
        sxy += dxi * y[i];
        sxx += dxi * dxi;
    }
    return sxy / (sxx * dx);
}

LineFit fit_power_law(std::span<const double> x, std::span<const double> y) {
    std::vector<double> lx, ly;
    lx.reserve(x.size());
    ly.reserve(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw PreconditionError("fit_power_law: data must be positive");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return fit_line(lx, ly);
}

std::vector<double> autocovariance(std::span<const double> v, std::size_t max_lag) {
    const std::size_t n = v.size();
    if (max_lag >= n) throw PreconditionError("autocovariance: lag exceeds sample count");
    const double m = mean(v);
    std::vector<double> out(max_lag + 1, 0.0);
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        double s = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) s += (v[i] - m) * (v[i + lag] - m);
        out[lag] = s / static_cast<double>(n);
    }
    return out;
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = n == 1 ? lo : std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

}  // namespace seo::stats
