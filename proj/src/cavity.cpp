#include "seo/cavity.hpp"

#include <cmath>

#include "seo/constants.hpp"
#include "seo/error.hpp"

namespace seo {

namespace {

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

void require_nondegenerate(const CavityParams& p) {
    p.validate();
    if (p.beta_plus2() == 0.0) throw ParameterError("degenerate cavity: all transmissions are zero");
}

}  // namespace

void CavityParams::validate() const {
    if (!in_unit(t_b) || !in_unit(t_a) || !in_unit(t_r))
        throw ParameterError("cavity: transmissions must lie in [0, 1]");
    if (!(finesse > 0.0)) throw ParameterError("cavity: finesse must be positive");
    if (!(lambda > 0.0)) throw ParameterError("cavity: lambda must be positive");
    if (!(length > 0.0)) throw ParameterError("cavity: length must be positive");
    if (!std::isfinite(x_r)) throw ParameterError("cavity: x_r must be finite");
}

double CavityParams::beta_plus2() const noexcept {
    const double s = t_b + t_a + t_r;
    return s * s / 8.0;
}

double CavityParams::beta_minus2() const noexcept {
    const double s = t_b - t_a - t_r;
    return s * s / 8.0;
}

void ThermoMechParams::validate() const {
    if (!(m > 0.0) || !(omega0 > 0.0) || !(gamma0 > 0.0) || !(kappa > 0.0) || !(t_eff > 0.0))
        throw ParameterError("thermo-mechanical: m, omega0, gamma0, kappa, t_eff must be positive");
    if (!(gamma2 >= 0.0)) throw ParameterError("thermo-mechanical: gamma2 must be non-negative");
    if (!std::isfinite(beta) || !std::isfinite(theta) || !std::isfinite(eta))
        throw ParameterError("thermo-mechanical: beta, theta, eta must be finite");
}

double intensity(const CavityParams& p, double x) {
    require_nondegenerate(p);
    const double bp2 = p.beta_plus2();
    const double bm2 = p.beta_minus2();
    const double phase = 4.0 * kPi * (x - p.x_r) / p.lambda;
    return p.finesse * (1.0 - bm2 / bp2) * bp2 / (1.0 - std::cos(phase) + bp2);
}

IntensityProfile::IntensityProfile(const CavityParams& p) {
    require_nondegenerate(p);
    amp_ = p.finesse * (p.beta_plus2() - p.beta_minus2());
    k_ = 4.0 * kPi / p.lambda;
    x_r_ = p.x_r;
    bp2_ = p.beta_plus2();
}

double reflection(const CavityParams& p, double x) {
    return 1.0 - intensity(p, x) / p.finesse;
}

IntensityDerivatives intensity_derivatives(const CavityParams& p, double x) {
    require_nondegenerate(p);
    const double bp2 = p.beta_plus2();
    const double bm2 = p.beta_minus2();
    const double a = p.finesse * (bp2 - bm2);   // numerator constant
    const double k = 4.0 * kPi / p.lambda;
    const double phase = k * (x - p.x_r);
    const double s = std::sin(phase);
    const double c = std::cos(phase);
    const double den = 1.0 - c + bp2;
    // I = a/den, den' = k s, den'' = k^2 c
    const double i0 = a / den;
    const double d1 = -a * k * s / (den * den);
    const double d2 = a * k * k * (2.0 * s * s / (den * den * den) - c / (den * den));
    return {i0, d1, d2};
}

double fsr(const CavityParams& p) {
    if (!(p.length > 0.0) || !(p.n_eff > 0.0)) throw ParameterError("fsr: length and n_eff must be positive");
    return p.lambda0 * p.lambda0 / (2.0 * p.n_eff * p.length);
}

EnvelopeCoefficients EnvelopeCoefficients::from_rates(double gamma_big0, double gamma_big2, double omega_big0,
                                                      double omega_big2, double theta_noise,
                                                      std::optional<double> omega_a) {
    if (gamma_big0 < 0.0 && !(gamma_big2 > 0.0))
        throw ParameterError("unsupported bifurcation: Gamma0 < 0 with Gamma2 <= 0 is subcritical");
    if (theta_noise < 0.0) throw ParameterError("Theta must be non-negative");
    EnvelopeCoefficients c;
    c.gamma_big0 = gamma_big0;
    c.gamma_big2 = gamma_big2;
    c.omega_big0 = omega_big0;
    c.omega_big2 = omega_big2;
    c.theta_noise = theta_noise;
    c.omega_h = omega_big0;
    if (gamma_big0 < 0.0) {
        const double r0 = std::sqrt(-gamma_big0 / gamma_big2);
        c.r0 = r0;
        c.zeta0 = 2.0 * omega_big2 * r0;
        c.omega_h = omega_big0 + omega_big2 * r0 * r0;
        c.omega_a = omega_a;
    }
    return c;
}

double static_displacement(const CavityParams& cav, const ThermoMechParams& tm, double p0) {
    tm.validate();
    const double scale = tm.eta * tm.theta * p0 / (tm.kappa * tm.omega0 * tm.omega0);
    double x = 0.0;
    for (int it = 0; it < 100; ++it) {
        const double next = scale * intensity(cav, x);
        if (std::abs(next - x) < 1e-15) return next;
        x = next;
    }
    throw PreconditionError("static displacement: self-consistency loop did not converge in 100 iterations");
}

EnvelopeCoefficients envelope_coefficients(const CavityParams& cav, const ThermoMechParams& tm, double p0,
                                           double p1, std::optional<double> x_eval) {
    tm.validate();
    const double xe = x_eval ? *x_eval : static_displacement(cav, tm, p0);
    const auto d = intensity_derivatives(cav, xe);
    const double w0 = tm.omega0;
    const double gain = tm.eta * p0;

    const double gamma_big0 = tm.gamma0 + gain * tm.theta * d.d1 / (2.0 * w0 * w0);
    const double gamma_big2 = tm.gamma2 + gain * tm.beta * d.d2 / (4.0 * w0);
    const double omega_big0 = w0 - gain * tm.beta * d.i0 / tm.kappa;
    const double omega_big2 = -gain * tm.beta * d.d2 / tm.kappa;
    const double theta_noise = tm.gamma0 * kBoltzmann * tm.t_eff / (4.0 * tm.m * w0 * w0);

    EnvelopeCoefficients c = EnvelopeCoefficients::from_rates(gamma_big0, gamma_big2, omega_big0, omega_big2,
                                                              theta_noise);
    c.x0 = gain * tm.theta * d.i0 / (tm.kappa * w0 * w0);
    c.x_eval = xe;
    if (c.r0) c.omega_a = tm.eta * p1 * d.i0 * tm.theta / (omega_big0 * omega_big0 * *c.r0);
    return c;
}

std::vector<std::string> ValidityReport::failures() const {
    std::vector<std::string> out;
    if (!kappa_small) out.emplace_back("kappa << omega0");
    if (!beta_ratio_lower) out.emplace_back("kappa^2/(omega0^3 lambda) << beta/theta");
    if (!beta_ratio_upper) out.emplace_back("beta/theta << 1/(2 omega0 x0)");
    return out;
}

ValidityReport check_validity(const CavityParams& cav, const ThermoMechParams& tm, double x0) {
    constexpr double kMuchLess = 0.1;
    ValidityReport r;
    const double w0 = tm.omega0;
    r.kappa_small = tm.kappa <= kMuchLess * w0;
    const double ratio = std::abs(tm.beta / tm.theta);
    r.beta_ratio_lower = tm.kappa * tm.kappa / (w0 * w0 * w0 * cav.lambda) <= kMuchLess * ratio;
    r.beta_ratio_upper = x0 == 0.0 || ratio <= kMuchLess / (2.0 * w0 * std::abs(x0));
    return r;
}

}  // namespace seo
