#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "seo/cavity.hpp"
#include "seo/time_series.hpp"

namespace seo {

struct EnvelopeDrive {
    double omega_d;  // rad/s
    double xi0;      // forcing magnitude (m/s)
};

struct EnvelopeRunOptions {
    cplx a0{0.0, 0.0};        // initial amplitude in the rotating frame
    std::size_t stride = 1;   // keep every stride-th step
};

// Euler-Maruyama path of dA/dt + (Gamma_eff + i Omega_eff) A = xi + noise,
// computed in the frame rotating at Omega_0. The returned series carries
// frame_omega = Omega_0; A_lab(t) = value * exp(-i Omega_0 t).
[[nodiscard]] ComplexSeries integrate_envelope(const EnvelopeCoefficients& c, std::optional<EnvelopeDrive> drive,
                                               double duration, double dt, std::uint64_t seed,
                                               const EnvelopeRunOptions& opts = {});

struct PolarSeries {
    RealSeries amplitude;
    RealSeries phase;   // unwrapped
};

// Throws PreconditionError naming the first zero sample.
[[nodiscard]] PolarSeries to_polar(const ComplexSeries& a);

struct SigmaFo {
    double sigma;
    bool classical;   // k_B T_eff >= 10 hbar omega0
};

// Relative frequency resolution of a forced oscillator.
[[nodiscard]] SigmaFo sigma_fo(double gamma0, double t_eff, double u0, double omega0, double t_a);

struct SigmaSeo {
    double sigma;
    double degradation;   // sqrt(1 + zeta0^2 / (4 |Gamma0| Gamma2))
};

[[nodiscard]] SigmaSeo sigma_seo(double sigma_fo_value, double zeta0, double gamma_big0, double gamma_big2);

// U0 = 4 m omega0^2 r0^2.
[[nodiscard]] double stored_energy(double m, double omega0, double r0);

struct FrequencyEstimate {
    double omega;        // mean angular frequency over windows
    double stddev;       // sample standard deviation of the window estimates
    double sigma;        // stddev / omega
    std::size_t windows;
};

// Per-window OLS slope of the unwrapped phase. The phase is taken to fall as
// -Omega t, so Omega = frame_omega - slope.
[[nodiscard]] FrequencyEstimate frequency_estimator(const RealSeries& phase, double t_a);

}  // namespace seo
