#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "seo/parallel.hpp"

namespace seo {

// Periodic map function F with period 2 pi. Built-ins are the sine map and
// the quadratic cap alpha_c/W_a [1 - z^2 d^2], d = theta - theta_c wrapped to
// [-pi, pi). Tabulated functions come from compose().
class MapFunction {
public:
    enum class Kind { Sine, QuadraticCap, Tabulated };

    static MapFunction sine();
    static MapFunction quadratic_cap(double alpha_c, double theta_c, double z);
    // Samples of F on theta_k = 2 pi k / n, interpolated by periodic cubic Lagrange.
    static MapFunction tabulated(std::vector<double> samples);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] double alpha_c() const noexcept { return alpha_c_; }
    [[nodiscard]] double theta_c() const noexcept { return theta_c_; }
    [[nodiscard]] double z() const noexcept { return z_; }

    // W_a * F(theta) and its derivative. The quadratic cap is defined through
    // alpha_c, so its product does not depend on W_a (zero when W_a == 0).
    [[nodiscard]] double term(double w_a, double theta) const;
    [[nodiscard]] double term_slope(double w_a, double theta) const;

private:
    Kind kind_ = Kind::Sine;
    double alpha_c_ = 0.0, theta_c_ = 0.0, z_ = 1.0;
    std::shared_ptr<const std::vector<double>> table_;
};

struct MapSpec {
    double alpha = 0.0;   // detuning per iteration (rad)
    double w_a = 0.0;     // drive strength
    MapFunction fn = MapFunction::sine();

    [[nodiscard]] double step(double theta) const { return theta - alpha + fn.term(w_a, theta); }
};

// theta_0 .. theta_n, unwrapped.
[[nodiscard]] std::vector<double> iterate(const MapSpec& spec, double theta0, std::size_t n_steps);

struct FixedPoint {
    double theta;
    double multiplier;   // 1 + W_a F'(theta*)
    bool stable;         // |multiplier| < 1
};

// Stable root of alpha = W_a F(theta) when one exists, otherwise the first root.
[[nodiscard]] std::optional<FixedPoint> fixed_point(const MapSpec& spec);

struct Rational {
    long p;
    long q;
};

// Continued-fraction convergent with q <= max_q within tol of w, if any.
[[nodiscard]] std::optional<Rational> detect_rational(double w, long max_q = 16, double tol = 1e-6);

struct Winding {
    double w;
    std::optional<Rational> locked;
};

[[nodiscard]] Winding winding_number(const MapSpec& spec, double theta0, std::size_t n_transient,
                                     std::size_t n_measure);

struct UnlockTime {
    double n;                          // drive periods per 2 pi slip
    std::optional<double> sideband;    // 2 pi / T_LC = omega_d / N
};

// Bottleneck passage estimate for the quadratic cap.
[[nodiscard]] UnlockTime unlock_time(const MapSpec& spec, double alpha, std::optional<double> omega_d = std::nullopt);

// p-fold iterate theta -> f^p(theta) expressed as a map with detuning p alpha.
// The residual is tabulated on 4096 points; w_a carries its amplitude.
[[nodiscard]] MapSpec compose(const MapSpec& spec, unsigned p);

// Mean number of q-step strobes between 2 pi slips of theta_{nq} - 2 pi p n,
// measured by direct iteration. Absent when fewer than two slips occur.
[[nodiscard]] std::optional<double> mean_slip_interval(const MapSpec& spec, long p, long q, double theta0,
                                                       std::size_t n_transient, std::size_t n_strobes);

struct TongueEdges {
    double lower;
    double upper;
};

// Edges in alpha of the p/q plateau (winding -p/q convention: theta falls by
// 2 pi p every q steps). Requires `alpha_inside` to be locked.
[[nodiscard]] TongueEdges tongue_edges(const MapSpec& spec, long p, long q, double alpha_inside,
                                       double search_halfwidth);

struct StaircasePoint {
    double alpha = 0.0;
    double w_a = 0.0;
    double winding = 0.0;
    long locked_p = 0;
    long locked_q = 0;   // 0 when no rational was detected
};

[[nodiscard]] std::vector<StaircasePoint> winding_staircase(const MapSpec& spec, const std::vector<double>& alphas,
                                                            double theta0, std::size_t n_transient,
                                                            std::size_t n_measure,
                                                            ExecPolicy policy = ExecPolicy::Parallel);

// CSV: "alpha,w_a,winding,locked_p,locked_q".
void write_staircase_csv(std::ostream& os, const std::vector<StaircasePoint>& rows);

}  // namespace seo
