#include <doctest.h>

#include <cmath>
#include <random>

#include "seo/cavity.hpp"
#include "seo/constants.hpp"
#include "seo/error.hpp"

using namespace seo;

namespace {

CavityParams device_cavity() {
    CavityParams c;
    c.t_b = 0.2;
    c.t_a = 0.05;
    c.t_r = 0.05;
    c.finesse = 2.1;
    c.lambda = 1545.498e-9;
    c.x_r = 0.0;
    return c;
}

CavityParams random_cavity(std::mt19937_64& g) {
    std::uniform_real_distribution<double> t(0.0, 1.0), f(0.1, 10.0);
    CavityParams c;
    c.t_b = t(g);
    c.t_a = t(g);
    c.t_r = t(g);
    if (c.t_b + c.t_a + c.t_r == 0.0) c.t_b = 0.5;
    c.finesse = f(g);
    c.lambda = 1e-6 * f(g);
    c.x_r = c.lambda * (t(g) - 0.5);
    return c;
}

}  // namespace

TEST_SUITE("cavity-optics") {

TEST_CASE("intensity at the maximum is beta_F (1 - beta-^2/beta+^2)") {
    const auto c = device_cavity();
    const double bp2 = 0.3 * 0.3 / 8.0, bm2 = 0.1 * 0.1 / 8.0;
    CHECK(intensity(c, c.x_r) == doctest::Approx(2.1 * (1.0 - bm2 / bp2)).epsilon(1e-14));
}

TEST_CASE("lossless mirrors give zero intensity and unit reflection") {
    auto c = device_cavity();
    c.t_a = 0.0;
    c.t_r = 0.0;
    for (double x : {0.0, 1e-7, 3.3e-7, -4e-7}) {
        CHECK(intensity(c, x) == 0.0);
        CHECK(reflection(c, x) == 1.0);
    }
}

TEST_CASE("intensity at x_D = lambda/8 matches hand evaluation") {
    // 4 pi x_D / lambda = pi/2, so the cosine vanishes:
    // I = beta_F (b+^2 - b-^2) / (1 + b+^2), b+^2 = 0.09/8, b-^2 = 0.01/8.
    const auto c = device_cavity();
    const double bp2 = 0.01125, bm2 = 0.00125;
    const double oracle = 2.1 * (bp2 - bm2) / (1.0 + bp2);
    CHECK(intensity(c, c.lambda / 8.0) == doctest::Approx(oracle).epsilon(1e-13));
    CHECK(reflection(c, c.lambda / 8.0) == doctest::Approx(1.0 - oracle / 2.1).epsilon(1e-13));
}

TEST_CASE("reflection at the maximum equals beta-^2/beta+^2") {
    const auto c = device_cavity();
    CHECK(reflection(c, 0.0) == doctest::Approx(1.0 / 9.0).epsilon(1e-13));
}

TEST_CASE("degenerate cavity is rejected") {
    auto c = device_cavity();
    c.t_b = c.t_a = c.t_r = 0.0;
    CHECK_THROWS_AS((void)intensity(c, 0.0), ParameterError);
    CHECK_THROWS_AS((void)reflection(c, 0.0), ParameterError);
    CHECK_THROWS_AS((void)intensity_derivatives(c, 0.0), ParameterError);
}

TEST_CASE("slope vanishes at the maximum and the minimum") {
    const auto c = device_cavity();
    CHECK(std::abs(intensity_derivatives(c, 0.0).d1) < 1e-6);
    CHECK(std::abs(intensity_derivatives(c, c.lambda / 4.0).d1) < 1e-6 * std::abs(intensity_derivatives(c, c.lambda / 8.0).d1));
}

TEST_CASE("closed-form derivatives agree with central differences") {
    std::mt19937_64 g(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto c = random_cavity(g);
        const double x = c.lambda * u(g);
        const double h = c.lambda * 1e-6;
        const auto d = intensity_derivatives(c, x);
        const double fd1 = (intensity(c, x + h) - intensity(c, x - h)) / (2.0 * h);
        // Curvature from differencing the slope, which was itself checked above.
        const double fd2 = (intensity_derivatives(c, x + h).d1 - intensity_derivatives(c, x - h).d1) / (2.0 * h);
        // Scale of each derivative over the profile, to stay clear of zeros.
        const double k = 4.0 * kPi / c.lambda;
        const double s1 = c.finesse * k, s2 = c.finesse * k * k;
        CHECK(std::abs(d.i0 - intensity(c, x)) <= 1e-14 * c.finesse);
        CHECK(std::abs(d.d1 - fd1) / std::max(std::abs(d.d1), 1e-3 * s1) < 1e-6);
        CHECK(std::abs(d.d2 - fd2) / std::max(std::abs(d.d2), 1e-3 * s2) < 1e-6);
    }
}

TEST_CASE("intensity is periodic with period lambda/2 and bounded") {
    std::mt19937_64 g(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 500; ++trial) {
        const auto c = random_cavity(g);
        const double x = c.lambda * u(g);
        const double i = intensity(c, x);
        CHECK(std::abs(intensity(c, x + c.lambda / 2.0) - i) <= 1e-12 * std::max(1.0, i));
        CHECK(i >= 0.0);
        CHECK(i <= c.finesse * (1.0 + 1e-15));
        const double r = reflection(c, x);
        CHECK(r >= -1e-15);
        CHECK(r <= 1.0 + 1e-15);
    }
}

TEST_CASE("free spectral range") {
    CavityParams c;
    c.lambda0 = 1545e-9;
    c.n_eff = 1.468;
    c.length = 10e-3;
    const double d = fsr(c);
    CHECK(d == doctest::Approx(1545e-9 * 1545e-9 / (2.0 * 1.468 * 10e-3)).epsilon(1e-14));
    CHECK(std::abs(d - 80e-12) < 2.5e-12);   // quoted as "about 80 pm"
    c.length = 20e-3;
    CHECK(fsr(c) == doctest::Approx(d / 2.0).epsilon(1e-14));
    c.lambda0 = 1.0;
    c.n_eff = 1.0;
    c.length = 0.5;
    CHECK(fsr(c) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("envelope coefficients decouple without absorption") {
    const auto c = device_cavity();
    ThermoMechParams tm;
    tm.omega0 = 2 * kPi * 236.4e3;
    tm.gamma0 = tm.omega0 / 7600.0;
    tm.gamma2 = 0.7;
    tm.beta = 3.0;
    tm.theta = 5.0;
    tm.eta = 0.0;
    tm.kappa = 1e4;
    const auto e = envelope_coefficients(c, tm, 1e-3, 1e-5);
    CHECK(e.x0 == 0.0);
    CHECK(e.gamma_big0 == tm.gamma0);
    CHECK(e.gamma_big2 == tm.gamma2);
    CHECK(e.omega_big0 == tm.omega0);
    CHECK(e.omega_big2 == 0.0);
    CHECK_FALSE(e.r0.has_value());
    CHECK_FALSE(e.omega_a.has_value());
}

TEST_CASE("Hopf amplitude identity") {
    const auto e = EnvelopeCoefficients::from_rates(-1.0, 1.0, 10.0, 0.5, 0.0);
    REQUIRE(e.r0.has_value());
    CHECK(*e.r0 == 1.0);
    CHECK(e.omega_h == 10.5);
    CHECK(*e.zeta0 == 1.0);
    CHECK_THROWS_AS((void)EnvelopeCoefficients::from_rates(-1.0, 0.0, 10.0, 0.5, 0.0), ParameterError);
    CHECK_THROWS_AS((void)EnvelopeCoefficients::from_rates(-1.0, -2.0, 10.0, 0.5, 0.0), ParameterError);
    CHECK_FALSE(EnvelopeCoefficients::from_rates(0.5, 1.0, 10.0, 0.5, 0.0).r0.has_value());
}

TEST_CASE("Theta at device values, step-by-step arithmetic") {
    ThermoMechParams tm;
    tm.m = 1.1e-12;
    tm.omega0 = 2.0 * 3.141592653589793 * 236.4e3;   // 1.48534e6 rad/s
    tm.gamma0 = tm.omega0 / (2.0 * 3800.0);          // 195.44 rad/s
    tm.t_eff = 77.0;
    tm.kappa = 1e3;
    tm.eta = 0.0;
    const auto e = envelope_coefficients(device_cavity(), tm, 0.0, 0.0);
    const double kt = 1.380649e-23 * 77.0;                      // 1.0631e-21 J
    const double denom = 4.0 * 1.1e-12 * tm.omega0 * tm.omega0;  // 9.7073e0 kg/s^2
    const double oracle = tm.gamma0 * kt / denom;                // about 2.14e-20 m^2/s
    CHECK(e.theta_noise == doctest::Approx(oracle).epsilon(1e-13));
    CHECK(e.theta_noise == doctest::Approx(2.1404e-20).epsilon(1e-3));
}

TEST_CASE("coefficient shifts are linear in P0 at fixed x_eval") {
    auto c = device_cavity();
    c.x_r = -c.lambda / 16.0;
    ThermoMechParams tm;
    tm.omega0 = 1e6;
    tm.gamma0 = 100.0;
    tm.gamma2 = 1e10;
    tm.beta = 10.0;
    tm.theta = 1e-3;
    tm.eta = 1e5;
    tm.kappa = 1e4;
    const double xe = 1e-9;
    const auto a = envelope_coefficients(c, tm, 1e-3, 0.0, xe);
    const auto b = envelope_coefficients(c, tm, 2e-3, 0.0, xe);
    CHECK(b.gamma_big0 - tm.gamma0 == doctest::Approx(2.0 * (a.gamma_big0 - tm.gamma0)).epsilon(1e-12));
    CHECK(b.gamma_big2 - tm.gamma2 == doctest::Approx(2.0 * (a.gamma_big2 - tm.gamma2)).epsilon(1e-12));
    CHECK(tm.omega0 - b.omega_big0 == doctest::Approx(2.0 * (tm.omega0 - a.omega_big0)).epsilon(1e-9));
    CHECK(b.omega_big2 == doctest::Approx(2.0 * a.omega_big2).epsilon(1e-12));
    CHECK(b.x0 == doctest::Approx(2.0 * a.x0).epsilon(1e-12));
}

TEST_CASE("static displacement satisfies its fixed-point equation") {
    auto c = device_cavity();
    c.x_r = -c.lambda / 10.0;
    ThermoMechParams tm;
    tm.omega0 = 1e6;
    tm.gamma0 = 100.0;
    tm.theta = 1e-2;
    tm.eta = 1e5;
    tm.kappa = 1e4;
    const double p0 = 1e-3;
    const double x = static_displacement(c, tm, p0);
    CHECK(x == doctest::Approx(tm.eta * tm.theta * p0 * intensity(c, x) / (tm.kappa * tm.omega0 * tm.omega0)).epsilon(1e-12));
    const auto e = envelope_coefficients(c, tm, p0, 0.0);
    CHECK(e.x_eval == x);
}

TEST_CASE("validity report names the failing inequality") {
    const auto c = device_cavity();
    ThermoMechParams tm;
    tm.omega0 = 1e6;
    tm.gamma0 = 1.0;
    tm.kappa = 5e5;   // not << omega0
    tm.beta = 1.0;
    tm.theta = 1.0;
    auto r = check_validity(c, tm, 1e-9);
    CHECK_FALSE(r.kappa_small);
    REQUIRE(r.failures().size() >= 1);
    CHECK(r.failures().front() == "kappa << omega0");
    tm.kappa = 1e3;
    tm.beta = 1e-3;
    tm.theta = 1.0;
    r = check_validity(c, tm, 1e-12);
    CHECK(r.ok());
}

}  // TEST_SUITE
