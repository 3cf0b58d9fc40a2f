#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "seo/cavity.hpp"
#include "seo/parallel.hpp"
#include "seo/time_series.hpp"

namespace seo {

struct FullState {
    double x = 0.0;      // m
    double v = 0.0;      // m/s
    double t_rel = 0.0;  // K
};

using StateSeries = TimeSeries<FullState>;

struct DriveProgram {
    double p0 = 0.0;       // W
    double eps = 0.0;      // P_L = p0 (1 + eps cos(omega_d t))
    double omega_d = 0.0;  // rad/s

    void validate() const;
};

struct FullRunOptions {
    std::size_t stride = 1;
    double record_start = 0.0;   // samples before this time are not stored
};

// Static working point at mean power p0 (noiseless, unmodulated):
// x = theta T / (omega0 - beta T)^2 with T = eta p0 I(x) / kappa.
// Several fringes can host a solution; the one nearest `hint` is returned.
[[nodiscard]] FullState static_equilibrium(const CavityParams& cav, const ThermoMechParams& tm, double p0,
                                           double hint = 0.0);

// RK4 of
//   x'' + 2 gamma0 x' + 2 gamma2 (x - x_eq)^2 x' + (omega0 - beta T)^2 x = theta T
//   T'  = eta P_L(t) I(x) - kappa T
// with x_eq the static working point nearest init.x (the gamma2 term vanishes
// when gamma2 = 0).
// With noise on, each step is followed by a velocity kick of variance
// 4 gamma0 k_B T_eff dt / m, the fluctuation-dissipation partner of gamma0.
[[nodiscard]] StateSeries integrate_full(const CavityParams& cav, const ThermoMechParams& tm,
                                         const DriveProgram& drive, const FullState& init, double duration,
                                         double dt, std::uint64_t seed, bool noise_on,
                                         const FullRunOptions& opts = {});

struct LockOptions {
    double transient_fraction = 0.25;
    double winding_tol = 1e-4;
    double phase_var_tol = 0.15421256876702122;   // (pi/8)^2
    std::size_t min_periods = 200;
};

struct LockReport {
    double omega_d = 0.0;
    double eps = 0.0;
    double winding = 0.0;       // oscillator phase advance per drive period / 2 pi
    bool locked = false;
    double mean_freq = 0.0;     // rad/s
    double phase_var = 0.0;     // variance of strobe phase minus 2 pi (p/q) n
    std::uint64_t seed = 0;
    std::size_t strobes = 0;
    // |winding - p/q| from the mean spacing of 2 pi slips of the strobe
    // residual; absent when fewer than two slips were seen.
    std::optional<double> slip_departure;
};

// Throws PreconditionError for fewer than min_periods drive periods after the
// transient, and NoOscillation-style PreconditionError when the oscillation
// amplitude is below 1e-3 of the trajectory maximum.
[[nodiscard]] LockReport detect_lock(const StateSeries& traj, double omega_d, long p, long q,
                                     const LockOptions& opts = {});

struct OscillationSummary {
    double amplitude;   // mean half peak-to-peak of x
    double frequency;   // rad/s, from upward zero crossings of x - mean
    double mean_x;
};

[[nodiscard]] OscillationSummary oscillation_summary(const StateSeries& traj, double transient_fraction = 0.25);

struct LockSweepConfig {
    double duration = 0.0;
    double dt = 0.0;
    FullState init{};
    bool noise_on = false;
    std::uint64_t seed = 0;
    LockOptions lock{};
};

// One trajectory per drive frequency, per-point seeds derive_seed(seed, i).
[[nodiscard]] std::vector<LockReport> lock_staircase(const CavityParams& cav, const ThermoMechParams& tm,
                                                     const DriveProgram& base, const std::vector<double>& omega_ds,
                                                     long p, long q, const LockSweepConfig& cfg,
                                                     ExecPolicy policy = ExecPolicy::Parallel);

// CSV: "omega_d,eps,winding,locked,mean_freq,phase_var,seed".
void write_lock_csv_header(std::ostream& os);
void write_lock_csv_row(std::ostream& os, const LockReport& r);

// Trajectory CSV: header like TimeSeries plus kind=full, then "x,v,t_rel".
void write_csv(std::ostream& os, const StateSeries& ts);

}  // namespace seo
