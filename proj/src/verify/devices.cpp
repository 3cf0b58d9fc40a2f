#include "devices.hpp"

namespace seo::verify {

CavityParams unit_cavity() {
    CavityParams c;
    c.lambda = 1.0;
    c.lambda0 = 1.0;
    return c;
}

DesignedDevice consistency_device(double gamma_factor, double beta_share) {
    DesignTargets t;
    t.gamma0 = 1.0 / 7600.0;
    t.kappa = 6.7e-3;
    t.phase = 0.15;
    t.gamma_big0 = -gamma_factor * t.gamma0;
    t.r0 = 0.002;
    t.beta_share = beta_share;
    return design_device(unit_cavity(), t);
}

DesignedDevice plateau_device() {
    DesignTargets t;   // defaults are the plateau set
    return design_device(unit_cavity(), t);
}

}  // namespace seo::verify
