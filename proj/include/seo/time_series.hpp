#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seo/error.hpp"

namespace seo {

using cplx = std::complex<double>;

// Uniformly sampled signal with provenance. Sample k sits at t0 + k*dt.
// frame_omega is nonzero when the samples live in a frame rotating at that
// angular frequency (lab value = sample * exp(-i*frame_omega*t)).
template <typename T>
class TimeSeries {
public:
    TimeSeries(double dt, std::vector<T> values, std::uint64_t seed = 0, double t0 = 0.0,
               double frame_omega = 0.0)
        : dt_(dt), t0_(t0), frame_omega_(frame_omega), seed_(seed), values_(std::move(values)) {
        if (!(dt_ > 0.0)) throw ParameterError("TimeSeries: dt must be positive");
        if (values_.empty()) throw ParameterError("TimeSeries: at least one sample required");
    }

    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] double t0() const noexcept { return t0_; }
    [[nodiscard]] double frame_omega() const noexcept { return frame_omega_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double time(std::size_t k) const noexcept { return t0_ + static_cast<double>(k) * dt_; }
    [[nodiscard]] double duration() const noexcept { return static_cast<double>(values_.size() - 1) * dt_; }
    [[nodiscard]] const std::vector<T>& values() const noexcept { return values_; }
    [[nodiscard]] const T& operator[](std::size_t k) const { return values_[k]; }

    // Samples from index `first` onward, keeping the time origin consistent.
    [[nodiscard]] TimeSeries tail(std::size_t first) const {
        if (first >= values_.size()) throw PreconditionError("TimeSeries::tail: index past end");
        return TimeSeries(dt_, std::vector<T>(values_.begin() + static_cast<std::ptrdiff_t>(first), values_.end()),
                          seed_, time(first), frame_omega_);
    }

private:
    double dt_;
    double t0_;
    double frame_omega_;
    std::uint64_t seed_;
    std::vector<T> values_;
};

using RealSeries = TimeSeries<double>;
using ComplexSeries = TimeSeries<cplx>;

// Shortest round-trip decimal, independent of the global locale.
[[nodiscard]] std::string format_double(double v);

// CSV: "# dt=<s> seed=<u64> t0=<s> kind=<real|complex>", optional
// "# frame_omega=<rad/s>", then one sample per line ("re,im" for complex).
void write_csv(std::ostream& os, const RealSeries& ts);
void write_csv(std::ostream& os, const ComplexSeries& ts);

// Reads either kind; real files come back with zero imaginary parts and
// `is_complex` set to false.
struct LoadedSeries {
    ComplexSeries series;
    bool is_complex;
};
[[nodiscard]] LoadedSeries read_csv(std::istream& is);

// Block-average decimation: each output sample is the mean of `factor`
// consecutive inputs and is stamped at the block centre.
template <typename T>
[[nodiscard]] TimeSeries<T> block_average(const TimeSeries<T>& ts, std::size_t factor) {
    if (factor == 0) throw ParameterError("block_average: factor must be >= 1");
    if (factor == 1) return ts;
    const std::size_t n = ts.size() / factor;
    if (n == 0) throw PreconditionError("block_average: series shorter than one block");
    std::vector<T> out(n);
    const auto& v = ts.values();
    for (std::size_t b = 0; b < n; ++b) {
        T acc{};
        for (std::size_t j = 0; j < factor; ++j) acc += v[b * factor + j];
        out[b] = acc / static_cast<double>(factor);
    }
    const double t0 = ts.t0() + 0.5 * static_cast<double>(factor - 1) * ts.dt();
    return TimeSeries<T>(ts.dt() * static_cast<double>(factor), std::move(out), ts.seed(), t0,
                         ts.frame_omega());
}

}  // namespace seo
