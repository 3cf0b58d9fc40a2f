#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "seo/time_series.hpp"

namespace seo {

// Dimensionless locking problem d(gamma)/d(tau) + sin(gamma) = i_b + i_n,
// <i_n(tau) i_n(tau')> = 2 D delta(tau - tau'), tau = omega_a t.
struct AdlerParams {
    double i_b = 0.0;
    double d_noise = 0.0;   // D = Theta / (omega_a r0^2)
    double omega_a = 1.0;   // rad/s
    double omega_d = 0.0;   // rad/s, 0 when unused

    void validate() const;
    // D from physical envelope quantities.
    [[nodiscard]] static double noise_from_physical(double theta_noise, double omega_a, double r0);
};

struct StationaryPhase {
    double gamma;      // in [-pi/2, pi/2]
    double cos_gamma;  // sqrt(1 - i_b^2)
};

[[nodiscard]] std::optional<StationaryPhase> stationary_phase(double i_b);

// Running-phase period T_J = 2 pi / sqrt(i_b^2 - 1), absent inside the tongue.
[[nodiscard]] std::optional<double> period(double i_b);

// Closed-form running solution, continued across branch cuts so that
// gamma(tau + T_J) = gamma(tau) + 2 pi sign(i_b). Throws for |i_b| <= 1.
[[nodiscard]] double gamma_noiseless(double i_b, double tau);

// Principal-branch inverse of gamma_noiseless, tau in (-T_J/2, T_J/2).
[[nodiscard]] double tau_of_gamma(double i_b, double gamma);

// atan(1/sqrt(i_b^2 - 1)), the offset inside the running-phase velocity.
[[nodiscard]] double phase_offset(double i_b);

// Fourier coefficients of d(gamma)/d(tau) in harmonics of 2 pi/T_J.
class FourierCoefficients {
public:
    FourierCoefficients(double i_b, int k_max);
    [[nodiscard]] int k_max() const noexcept { return k_max_; }
    [[nodiscard]] cplx operator[](int k) const;   // |k| <= k_max

private:
    int k_max_;
    std::vector<cplx> g_;   // index k + k_max
};

[[nodiscard]] FourierCoefficients fourier_coefficients(double i_b, int k_max);

// Relative power of the spectral lines of exp(-i gamma(tau)) in the running
// regime. Line k sits at angular offset i_b - k sqrt(i_b^2-1) (units of
// omega_a) from the drive for i_b > 0, mirrored for i_b < 0. k >= 0 only.
[[nodiscard]] std::vector<double> comb_line_weights(double i_b, int k_max);

// sqrt((omega_d - Omega_eff)^2 - omega_a^2) outside the tongue.
[[nodiscard]] std::optional<double> sideband_spacing(double omega_d, double omega_eff, double omega_a);

struct AdlerRunOptions {
    std::size_t stride = 1;
};

// Euler-Maruyama path; increments of variance 2 D d_tau. Series time unit is tau.
[[nodiscard]] RealSeries integrate_adler(const AdlerParams& p, double gamma_init, double duration_tau,
                                         double d_tau, std::uint64_t seed, const AdlerRunOptions& opts = {});

// Lorentzian (D/pi) / (1 - i_b^2 + w^2) of the linearised locked phase.
[[nodiscard]] double phase_noise_psd(const AdlerParams& p, double w);

// C(tau') = D / sqrt(1 - i_b^2) * exp(-sqrt(1 - i_b^2) |tau'|).
[[nodiscard]] double correlation(const AdlerParams& p, double tau_lag);

struct JitterRate {
    double dimensionless;   // gamma_g = D
    double per_second;      // omega_a * gamma_g
};

[[nodiscard]] JitterRate jitter_rate(const AdlerParams& p);

struct SyncSensitivity {
    double delta_gamma;
    double responsivity;    // omega_a sqrt(1 - i_b^2), rad/s
    double delta_omega;     // rad/s
    std::optional<double> relative;   // delta_omega / Omega_H
};

[[nodiscard]] SyncSensitivity sync_sensitivity(const AdlerParams& p, double tau_a,
                                               std::optional<double> omega_h = std::nullopt);

struct Washboard {
    double potential;                  // U_b(gamma) = -cos(gamma) - i_b gamma
    std::optional<double> barrier;     // Delta U between adjacent min and max
    std::optional<double> kramers_rate;// per unit tau, needs d_noise > 0
    std::optional<double> unstable_point;   // pi - asin(i_b)
};

// Kramers prefactor is the overdamped form sqrt(U''min |U''max|)/(2 pi).
[[nodiscard]] Washboard washboard(double i_b, double gamma, double d_noise = 0.0);

// Mean d(gamma)/d(tau) measured between the first and last crossings of
// gamma_start + 2 pi k, i.e. over an integer number of windings. Falls back
// to the endpoint slope when fewer than two crossings exist.
[[nodiscard]] double mean_winding_rate(const RealSeries& gamma);

struct SlipCount {
    std::size_t forward = 0;
    std::size_t backward = 0;
    std::vector<double> times;   // series time of each slip
};

// Phase slips between wells of period 2 pi around reference `centre`.
// A slip registers once the phase sits within `band` of a neighbouring
// well centre; the band supplies the hysteresis.
[[nodiscard]] SlipCount count_phase_slips(const RealSeries& gamma, double centre, double band = 1.5707963267948966);

}  // namespace seo
