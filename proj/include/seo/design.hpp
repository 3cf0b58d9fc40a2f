#pragma once

#include "seo/cavity.hpp"
#include "seo/full_dynamics.hpp"

namespace seo {

// Inverse design of a self-excited working point. The static displacement
// is placed so that 4 pi (x - x_r) / lambda = phase, then eta P0, beta and
// gamma2 are chosen to give the requested Gamma0 and r0, with `beta_share`
// of Gamma2 supplied by the optical (beta) channel and the rest by gamma2.
struct DesignTargets {
    double omega0 = 1.0;
    double gamma0 = 0.01;
    double kappa = 0.1;
    double theta = 1.0;
    double eta = 1.0;
    double phase = 0.05;        // rad, detuning from the intensity maximum
    double gamma_big0 = -0.05;  // target, must be negative
    double r0 = 0.01;           // target envelope amplitude (m)
    double beta_share = 0.01;   // in (0, 1]
    double m = 1.1e-12;
    double t_eff = 77.0;

    void validate() const;
};

struct DesignedDevice {
    CavityParams cav;
    ThermoMechParams tm;
    double p0 = 0.0;
    FullState equilibrium;         // static working point
    EnvelopeCoefficients coeffs;   // evaluated at the working point, p1 = 0
};

// `cav` supplies everything but x_r, which is overwritten.
[[nodiscard]] DesignedDevice design_device(const CavityParams& cav, const DesignTargets& t);

}  // namespace seo
