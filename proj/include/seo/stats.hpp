#pragma once

#include <span>
#include <vector>

namespace seo::stats {

[[nodiscard]] double mean(std::span<const double> v);
// Unbiased (n-1) sample variance.
[[nodiscard]] double variance(std::span<const double> v);
[[nodiscard]] double stddev(std::span<const double> v);

struct LineFit {
    double slope;
    double intercept;
    double r2;
};

// Ordinary least squares y = slope*x + intercept.
[[nodiscard]] LineFit fit_line(std::span<const double> x, std::span<const double> y);

// OLS slope of y against uniformly spaced abscissae 0, dx, 2dx, ...
[[nodiscard]] double uniform_slope(std::span<const double> y, double dx);

// Fit y = c * x^p on positive data; returns p as slope.
[[nodiscard]] LineFit fit_power_law(std::span<const double> x, std::span<const double> y);

// Biased autocovariance at lags 0..max_lag after mean removal.
[[nodiscard]] std::vector<double> autocovariance(std::span<const double> v, std::size_t max_lag);

[[nodiscard]] std::vector<double> logspace(double lo, double hi, std::size_t n);
[[nodiscard]] std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace seo::stats
