#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "seo/constants.hpp"
#include "seo/envelope.hpp"
#include "seo/error.hpp"
#include "seo/stats.hpp"

using namespace seo;

namespace {

// Stationary <|A|^2> from the radial Fokker-Planck density
// p(r) ~ r exp(-(G0 r^2/2 + G2 r^4/4)/Theta), by dense trapezoidal quadrature.
double fokker_planck_mean_r2(double g0, double g2, double theta) {
    const double rmax = 10.0 * std::sqrt(std::max(std::abs(g0) / g2, std::sqrt(theta / g2)));
    const int n = 200000;
    const double h = rmax / n;
    double num = 0.0, den = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double r = h * k;
        const double w = (k == 0 || k == n) ? 0.5 : 1.0;
        const double p = r * std::exp(-(g0 * r * r / 2.0 + g2 * r * r * r * r / 4.0) / theta);
        num += w * r * r * p;
        den += w * p;
    }
    return num / den;
}

double late_mean_amplitude(const ComplexSeries& a) {
    const auto& v = a.values();
    double s = 0.0;
    const std::size_t from = v.size() * 3 / 4;
    for (std::size_t k = from; k < v.size(); ++k) s += std::abs(v[k]);
    return s / static_cast<double>(v.size() - from);
}

}  // namespace

TEST_SUITE("envelope-model") {

TEST_CASE("noiseless sub-threshold amplitude decays monotonically") {
    const auto c = EnvelopeCoefficients::from_rates(0.5, 1.0, 100.0, 0.3, 0.0);
    EnvelopeRunOptions o;
    o.a0 = {0.8, 0.1};
    const auto a = integrate_envelope(c, std::nullopt, 20.0, 0.01, 1, o);
    const auto& v = a.values();
    for (std::size_t k = 1; k < v.size(); ++k) REQUIRE(std::abs(v[k]) < std::abs(v[k - 1]));
    CHECK(std::abs(v.back()) < 1e-4);
    CHECK(a.frame_omega() == 100.0);
}

TEST_CASE("noiseless limit cycle reaches r0, rotates at Omega_H and converges in dt") {
    const auto c = EnvelopeCoefficients::from_rates(-0.2, 0.8, 50.0, -0.4, 0.0);
    EnvelopeRunOptions o;
    o.a0 = {0.05, 0.0};
    const auto a = integrate_envelope(c, std::nullopt, 200.0, 0.02, 3, o);
    const double r = late_mean_amplitude(a);
    CHECK(std::abs(r - *c.r0) / *c.r0 < 1e-2);

    const auto polar = to_polar(a.tail(a.size() / 2));
    const double slope_rot = stats::uniform_slope(polar.phase.values(), polar.phase.dt());
    CHECK(std::abs(-slope_rot - (c.omega_h - c.omega_big0)) < 1e-3 * std::abs(c.omega_h - c.omega_big0));
    const auto f = frequency_estimator(polar.phase, 5.0);
    CHECK(f.omega == doctest::Approx(c.omega_h).epsilon(1e-6));

    const auto half = integrate_envelope(c, std::nullopt, 200.0, 0.01, 3, o);
    CHECK(std::abs(late_mean_amplitude(half) - r) / r < 5e-3);
}

TEST_CASE("stochastic mean |A|^2 matches the Fokker-Planck stationary density") {
    for (double g0 : {-0.5, 0.3}) {
        const auto c = EnvelopeCoefficients::from_rates(g0, 1.0, 0.0, 2.0, 0.1);
        EnvelopeRunOptions o;
        o.a0 = {0.5, 0.0};
        o.stride = 10;
        const auto a = integrate_envelope(c, std::nullopt, 20000.0, 0.005, 99, o);
        const auto& v = a.values();
        double s = 0.0;
        const std::size_t from = v.size() / 20;
        for (std::size_t k = from; k < v.size(); ++k) s += std::norm(v[k]);
        const double sim = s / static_cast<double>(v.size() - from);
        const double oracle = fokker_planck_mean_r2(g0, 1.0, 0.1);
        CAPTURE(g0);
        CHECK(std::abs(sim - oracle) / oracle < 0.05);
    }
}

TEST_CASE("identical seeds replay bit for bit") {
    const auto c = EnvelopeCoefficients::from_rates(-0.3, 1.0, 10.0, 1.0, 0.02);
    EnvelopeRunOptions o;
    o.a0 = {0.5, 0.0};
    const auto a = integrate_envelope(c, EnvelopeDrive{10.1, 0.05}, 50.0, 0.01, 1234, o);
    const auto b = integrate_envelope(c, EnvelopeDrive{10.1, 0.05}, 50.0, 0.01, 1234, o);
    CHECK(a.values() == b.values());
    const auto d = integrate_envelope(c, EnvelopeDrive{10.1, 0.05}, 50.0, 0.01, 1235, o);
    CHECK(a.values() != d.values());
}

TEST_CASE("step guard and parameter errors") {
    const auto c = EnvelopeCoefficients::from_rates(-1.0, 1.0, 0.0, 1.0, 0.0);
    CHECK_THROWS_AS((void)integrate_envelope(c, std::nullopt, 1.0, 0.1, 1), PreconditionError);
    CHECK_THROWS_AS((void)integrate_envelope(c, EnvelopeDrive{10.0, 1.0}, 1.0, 0.01, 1), PreconditionError);
    auto bad = c;
    bad.theta_noise = -1.0;
    CHECK_THROWS_AS((void)integrate_envelope(bad, std::nullopt, 1.0, 0.001, 1), ParameterError);
}

TEST_CASE("to_polar") {
    SUBCASE("constant phasor") {
        const ComplexSeries a(0.1, std::vector<cplx>(20, std::polar(2.0, 0.7)));
        const auto p = to_polar(a);
        for (std::size_t k = 0; k < 20; ++k) {
            CHECK(p.amplitude[k] == doctest::Approx(2.0).epsilon(1e-15));
            CHECK(p.phase[k] == doctest::Approx(0.7).epsilon(1e-15));
        }
    }
    SUBCASE("clockwise rotation unwraps to -omega t") {
        const double w = 3.0, dt = 0.05;
        std::vector<cplx> v(2000);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::polar(1.0, -w * dt * static_cast<double>(k));
        const auto p = to_polar(ComplexSeries(dt, v));
        for (std::size_t k = 0; k < v.size(); ++k) CHECK(p.phase[k] == doctest::Approx(-w * dt * static_cast<double>(k)).epsilon(1e-12));
    }
    SUBCASE("round trip") {
        std::mt19937_64 g(5);
        std::normal_distribution<double> n;
        std::vector<cplx> v(500);
        for (auto& z : v) z = {n(g), n(g)};
        const auto p = to_polar(ComplexSeries(1.0, v));
        for (std::size_t k = 0; k < v.size(); ++k) {
            const cplx back = std::polar(p.amplitude[k], p.phase[k]);
            CHECK(std::abs(back - v[k]) <= 1e-12 * std::abs(v[k]));
        }
    }
    SUBCASE("zero sample is reported with its index") {
        const ComplexSeries a(1.0, {cplx{1, 0}, cplx{0, 0}, cplx{1, 1}});
        try {
            (void)to_polar(a);
            FAIL("expected an error");
        } catch (const PreconditionError& e) {
            CHECK(std::string(e.what()).find("index 1") != std::string::npos);
        }
    }
}

TEST_CASE("sigma_fo") {
    const auto a = sigma_fo(2.0, 1.0 / kBoltzmann, 1.0, 2.0, 1.0);
    CHECK(a.sigma == doctest::Approx(1.0).epsilon(1e-14));
    const auto b = sigma_fo(3.0, 300.0, 1e-12, 1e6, 0.1);
    const auto b4 = sigma_fo(3.0, 300.0, 1e-12, 1e6, 0.4);
    CHECK(b4.sigma == doctest::Approx(b.sigma / 2.0).epsilon(1e-14));
    CHECK_THROWS_AS((void)sigma_fo(0.0, 1.0, 1.0, 1.0, 1.0), ParameterError);
    CHECK_THROWS_AS((void)sigma_fo(1.0, 1.0, 1.0, 1.0, -1.0), ParameterError);

    // Device values: omega0/2pi = 236.4 kHz, Q = 3800, m = 1.1e-12 kg, T = 77 K, r0 = 10 nm.
    const double w0 = 2.0 * kPi * 236.4e3;
    const double g0 = w0 / 7600.0;
    const double u0 = 4.0 * 1.1e-12 * w0 * w0 * 1e-8 * 1e-8;   // 9.707e-16 J
    const double kt = 1.380649e-23 * 77.0;
    const double t_a = 1.0;
    const double oracle = std::sqrt(2.0 * g0 * kt / (u0 * w0 * w0 * t_a));   // ~ 1.4e-9
    const auto dev = sigma_fo(g0, 77.0, u0, w0, t_a);
    CHECK(dev.sigma == doctest::Approx(oracle).epsilon(1e-13));
    CHECK(dev.sigma == doctest::Approx(1.4586e-9).epsilon(1e-3));
    CHECK(dev.classical);
    CHECK_FALSE(sigma_fo(1.0, 1e-3, 1.0, 1e12, 1.0).classical);
}

TEST_CASE("sigma_seo degradation factor") {
    CHECK(sigma_seo(0.3, 0.0, -1.0, 2.0).sigma == 0.3);
    const double g0 = -0.7, g2 = 1.3;
    const auto ten = sigma_seo(1.0, std::sqrt(4.0 * 0.7 * g2 * 99.0), g0, g2);
    CHECK(ten.degradation == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(sigma_seo(1.0, std::sqrt(4.0 * 0.7 * g2), g0, g2).degradation == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS((void)sigma_seo(1.0, 1.0, 0.0, 1.0), PreconditionError);
    std::mt19937_64 g(3);
    std::uniform_real_distribution<double> u(0.01, 5.0);
    for (int i = 0; i < 100; ++i) {
        const double s = u(g);
        CHECK(sigma_seo(s, u(g), -u(g), u(g)).sigma >= s);
    }
}

TEST_CASE("stored energy and the jitter-rate identity") {
    CHECK(stored_energy(1.0, 1.0, 1.0) == 4.0);
    CHECK(stored_energy(2.0, 3.0, 0.2) * 4.0 == doctest::Approx(stored_energy(2.0, 3.0, 0.4)).epsilon(1e-15));
    std::mt19937_64 g(17);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int i = 0; i < 100; ++i) {
        const double m = u(g) * 1e-12, w0 = u(g) * 1e5, r0 = u(g) * 1e-9, g0 = u(g) * 10.0, t = u(g) * 30.0,
                     wa = u(g) * 100.0;
        const double kt = kBoltzmann * t;
        const double theta = g0 * kt / (4.0 * m * w0 * w0);
        const double lhs = kt / stored_energy(m, w0, r0) * g0;
        const double rhs = wa * (theta / (wa * r0 * r0));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
    }
}

TEST_CASE("frequency estimator on a noiseless ramp") {
    const double w = 7.5, dt = 0.01;
    std::vector<double> ph(10000);
    for (std::size_t k = 0; k < ph.size(); ++k) ph[k] = -w * dt * static_cast<double>(k);
    const auto f = frequency_estimator(RealSeries(dt, ph), 5.0);
    CHECK(f.omega == doctest::Approx(w).epsilon(1e-12));
    CHECK(f.stddev < 1e-9);
    CHECK(f.windows == 20);
    CHECK_THROWS_AS((void)frequency_estimator(RealSeries(dt, ph), 20.0), PreconditionError);
}

TEST_CASE("time-series CSV round trip is exact") {
    std::vector<cplx> v{{1.5, -2.25}, {1e-300, 3.0e10}, {-0.1, 0.2}};
    const ComplexSeries a(0.125, v, 42, -3.5, 1000.0);
    std::stringstream ss;
    write_csv(ss, a);
    const std::string text = ss.str();
    CHECK(text.rfind("# dt=0.125 seed=42 t0=-3.5 kind=complex\n", 0) == 0);
    const auto back = read_csv(ss);
    CHECK(back.is_complex);
    CHECK(back.series.values() == v);
    CHECK(back.series.seed() == 42);
    CHECK(back.series.frame_omega() == 1000.0);
    CHECK(back.series.t0() == -3.5);
}

}  // TEST_SUITE
