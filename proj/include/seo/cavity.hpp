#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace seo {

struct CavityParams {
    double t_b = 0.2;        // transmission probabilities per pass
    double t_a = 0.05;
    double t_r = 0.05;
    double finesse = 2.1;    // beta_F
    double lambda = 1545e-9; // laser wavelength (m)
    double x_r = 0.0;        // displacement of the intensity maximum (m)
    double lambda0 = 1545e-9;// FBG centre wavelength (m)
    double n_eff = 1.468;
    double length = 10e-3;   // cavity length (m)

    // Throws ParameterError on out-of-range fields.
    void validate() const;
    [[nodiscard]] double beta_plus2() const noexcept;
    [[nodiscard]] double beta_minus2() const noexcept;
};

struct ThermoMechParams {
    double m = 1.1e-12;      // kg
    double omega0 = 0.0;     // rad/s
    double gamma0 = 0.0;     // rad/s
    double gamma2 = 0.0;     // rad/(s m^2)
    double beta = 0.0;       // rad/(s K)
    double theta = 0.0;      // m/(s^2 K)
    double eta = 0.0;        // K/(s W)
    double kappa = 0.0;      // 1/s
    double t_eff = 77.0;     // K

    void validate() const;
};

// Intra-cavity intensity I(x); periodic in x - x_r with period lambda/2.
[[nodiscard]] double intensity(const CavityParams& p, double x);

// Validated, precomputed I(x) for inner loops.
class IntensityProfile {
public:
    explicit IntensityProfile(const CavityParams& p);
    [[nodiscard]] double operator()(double x) const noexcept {
        return amp_ / (1.0 - std::cos(k_ * (x - x_r_)) + bp2_);
    }

private:
    double amp_, k_, x_r_, bp2_;
};

// Cavity reflection probability 1 - I/beta_F.
[[nodiscard]] double reflection(const CavityParams& p, double x);

struct IntensityDerivatives {
    double i0;
    double d1;
    double d2;
};

// Closed-form value, slope and curvature of I at x.
[[nodiscard]] IntensityDerivatives intensity_derivatives(const CavityParams& p, double x);

// Free spectral range in wavelength, lambda0^2 / (2 n_eff l).
[[nodiscard]] double fsr(const CavityParams& p);

struct EnvelopeCoefficients {
    double x0 = 0.0;
    double gamma_big0 = 0.0;
    double gamma_big2 = 0.0;
    double omega_big0 = 0.0;
    double omega_big2 = 0.0;
    double theta_noise = 0.0;
    std::optional<double> r0;
    double omega_h = 0.0;          // Omega_0 + Omega_2 r0^2 (Omega_0 below threshold)
    std::optional<double> zeta0;
    std::optional<double> omega_a;
    double x_eval = 0.0;           // where I and its derivatives were evaluated

    // Builds a coefficient set directly, filling the derived fields.
    static EnvelopeCoefficients from_rates(double gamma_big0, double gamma_big2, double omega_big0,
                                           double omega_big2, double theta_noise,
                                           std::optional<double> omega_a = std::nullopt);
};

// Static displacement fixed point x = eta*theta*P0*I(x)/(kappa*omega0^2).
[[nodiscard]] double static_displacement(const CavityParams& cav, const ThermoMechParams& tm, double p0);

// Slow-envelope constants. x_eval defaults to the static displacement.
// Throws ParameterError for a subcritical set (Gamma0 < 0 with Gamma2 <= 0).
[[nodiscard]] EnvelopeCoefficients envelope_coefficients(const CavityParams& cav, const ThermoMechParams& tm,
                                                         double p0, double p1,
                                                         std::optional<double> x_eval = std::nullopt);

// Checks of the ordering assumptions behind the envelope reduction.
// "a << b" is taken as a <= 0.1 b.
struct ValidityReport {
    bool kappa_small = true;        // kappa << omega0
    bool beta_ratio_lower = true;   // kappa^2/(omega0^3 lambda) << beta/theta
    bool beta_ratio_upper = true;   // beta/theta << 1/(2 omega0 x0)
    [[nodiscard]] bool ok() const noexcept { return kappa_small && beta_ratio_lower && beta_ratio_upper; }
    [[nodiscard]] std::vector<std::string> failures() const;
};

[[nodiscard]] ValidityReport check_validity(const CavityParams& cav, const ThermoMechParams& tm, double x0);

}  // namespace seo
