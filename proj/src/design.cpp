#include "seo/design.hpp"

#include <cmath>

#include "seo/constants.hpp"
#include "seo/error.hpp"

namespace seo {

void DesignTargets::validate() const {
    if (!(omega0 > 0.0) || !(gamma0 > 0.0) || !(kappa > 0.0) || !(r0 > 0.0))
        throw ParameterError("design: omega0, gamma0, kappa and r0 must be positive");
    if (!(gamma_big0 < 0.0)) throw ParameterError("design: target Gamma0 must be negative (above threshold)");
    if (!(beta_share > 0.0 && beta_share <= 1.0)) throw ParameterError("design: beta_share must lie in (0, 1]");
    if (theta == 0.0 || eta == 0.0) throw ParameterError("design: theta and eta must be non-zero");
}

DesignedDevice design_device(const CavityParams& cav_in, const DesignTargets& t) {
    t.validate();
    DesignedDevice d;
    d.cav = cav_in;
    d.cav.x_r = 0.0;
    d.cav.validate();
    const double x_d = t.phase * d.cav.lambda / (4.0 * kPi);
    const auto der = intensity_derivatives(d.cav, x_d);
    if (der.d1 == 0.0 || der.d2 == 0.0) throw ParameterError("design: phase sits on an extremum of the intensity");

    // Gamma0 = gamma0 + gain theta I' / (2 omega0^2).
    const double gain = 2.0 * (t.gamma_big0 - t.gamma0) * t.omega0 * t.omega0 / (t.theta * der.d1);
    if (!(gain > 0.0)) throw ParameterError("design: the requested Gamma0 needs negative optical gain at this phase");
    const double gamma_big2 = -t.gamma_big0 / (t.r0 * t.r0);

    ThermoMechParams& tm = d.tm;
    tm.m = t.m;
    tm.t_eff = t.t_eff;
    tm.omega0 = t.omega0;
    tm.gamma0 = t.gamma0;
    tm.kappa = t.kappa;
    tm.theta = t.theta;
    tm.eta = t.eta;
    // Gamma2 = gamma2 + gain beta I'' / (4 omega0).
    tm.beta = t.beta_share * gamma_big2 * 4.0 * t.omega0 / (gain * der.d2);
    tm.gamma2 = (1.0 - t.beta_share) * gamma_big2;
    d.p0 = gain / t.eta;

    // Static point at the design intensity, then shift the cavity under it.
    const double temp = gain * der.i0 / t.kappa;
    const double w = t.omega0 - tm.beta * temp;
    const double x_static = t.theta * temp / (w * w);
    d.cav.x_r = x_static - x_d;
    d.equilibrium = {x_static, 0.0, temp};
    d.coeffs = envelope_coefficients(d.cav, tm, d.p0, 0.0, x_static);
    return d;
}

}  // namespace seo
