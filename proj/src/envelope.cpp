#include "seo/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "seo/constants.hpp"
#include "seo/error.hpp"
#include "seo/rng.hpp"
#include "seo/stats.hpp"

namespace seo {

ComplexSeries integrate_envelope(const EnvelopeCoefficients& c, std::optional<EnvelopeDrive> drive,
                                 double duration, double dt, std::uint64_t seed, const EnvelopeRunOptions& opts) {
    if (c.theta_noise < 0.0) throw ParameterError("integrate_envelope: Theta must be non-negative");
    if (!(dt > 0.0) || !(duration >= dt)) throw PreconditionError("integrate_envelope: need duration >= dt > 0");
    if (opts.stride == 0) throw ParameterError("integrate_envelope: stride must be >= 1");

    const double r2 = std::max(c.r0 ? *c.r0 * *c.r0 : 0.0, std::norm(opts.a0));
    double rate = std::max({std::abs(c.gamma_big0), c.gamma_big2 * r2, std::abs(c.omega_big2) * r2});
    if (drive) rate = std::max(rate, std::abs(drive->omega_d - c.omega_big0));
    if (dt * rate >= 0.05)
        throw PreconditionError("integrate_envelope: step guard dt*rate = " + std::to_string(dt * rate) +
                                " must be < 0.05");

    const auto steps = static_cast<std::size_t>(std::llround(duration / dt));
    std::vector<cplx> out;
    out.reserve(steps / opts.stride + 1);

    GaussianSource gauss(seed);
    const double kick = std::sqrt(2.0 * c.theta_noise * dt);
    const bool noisy = c.theta_noise > 0.0;
    const double detune = drive ? drive->omega_d - c.omega_big0 : 0.0;
    const double xi0 = drive ? drive->xi0 : 0.0;

    cplx a = opts.a0;
    out.push_back(a);
    for (std::size_t n = 1; n <= steps; ++n) {
        const double t = static_cast<double>(n - 1) * dt;
        const double r2n = std::norm(a);
        const cplx rhs = -cplx(c.gamma_big0 + c.gamma_big2 * r2n, c.omega_big2 * r2n) * a +
                         (drive ? xi0 * std::polar(1.0, -detune * t) : cplx{});
        a += dt * rhs;
        if (noisy) {
            const double nx = gauss();
            const double ny = gauss();
            a += cplx(kick * nx, kick * ny);
        }
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw DivergenceError("integrate_envelope: non-finite amplitude", static_cast<double>(n) * dt);
        if (n % opts.stride == 0) out.push_back(a);
    }
    return ComplexSeries(dt * static_cast<double>(opts.stride), std::move(out), seed, 0.0, c.omega_big0);
}

PolarSeries to_polar(const ComplexSeries& a) {
    const auto& v = a.values();
    std::vector<double> r(v.size()), ph(v.size());
    double prev = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (v[k] == cplx{})
            throw PreconditionError("to_polar: phase undefined at zero sample index " + std::to_string(k));
        r[k] = std::abs(v[k]);
        const double wrapped = std::arg(v[k]);
        if (k == 0) {
            ph[k] = wrapped;
        } else {
            double step = wrapped - std::remainder(prev, kTwoPi);
            step = std::remainder(step, kTwoPi);   // (-pi, pi]
            if (step == -kPi) step = kPi;
            ph[k] = prev + step;
        }
        prev = ph[k];
    }
    return {RealSeries(a.dt(), std::move(r), a.seed(), a.t0(), a.frame_omega()),
            RealSeries(a.dt(), std::move(ph), a.seed(), a.t0(), a.frame_omega())};
}

SigmaFo sigma_fo(double gamma0, double t_eff, double u0, double omega0, double t_a) {
    if (!(gamma0 > 0.0) || !(t_eff > 0.0) || !(u0 > 0.0) || !(omega0 > 0.0) || !(t_a > 0.0))
        throw ParameterError("sigma_fo: all inputs must be positive");
    const double kt = kBoltzmann * t_eff;
    const double s = std::sqrt(2.0 * gamma0 * kt / (u0 * omega0 * omega0 * t_a));
    return {s, kt >= 10.0 * kHbar * omega0};
}

SigmaSeo sigma_seo(double sigma_fo_value, double zeta0, double gamma_big0, double gamma_big2) {
    if (!(gamma_big0 < 0.0)) throw PreconditionError("sigma_seo: below threshold (Gamma0 >= 0)");
    if (!(gamma_big2 > 0.0)) throw PreconditionError("sigma_seo: Gamma2 must be positive");
    const double factor = std::sqrt(1.0 + zeta0 * zeta0 / (4.0 * std::abs(gamma_big0) * gamma_big2));
    return {sigma_fo_value * factor, factor};
}

double stored_energy(double m, double omega0, double r0) {
    if (!(m > 0.0) || !(omega0 > 0.0) || !(r0 > 0.0)) throw ParameterError("stored_energy: inputs must be positive");
    return 4.0 * m * omega0 * omega0 * r0 * r0;
}

FrequencyEstimate frequency_estimator(const RealSeries& phase, double t_a) {
    if (!(t_a > 0.0)) throw ParameterError("frequency_estimator: t_a must be positive");
    const double total = static_cast<double>(phase.size()) * phase.dt();
    if (total < 10.0 * t_a) throw PreconditionError("frequency_estimator: series shorter than 10 windows");
    const auto len = static_cast<std::size_t>(std::llround(t_a / phase.dt()));
    if (len < 2) throw PreconditionError("frequency_estimator: window shorter than two samples");
    const std::size_t nwin = phase.size() / len;
    std::vector<double> est(nwin);
    const auto& v = phase.values();
    for (std::size_t w = 0; w < nwin; ++w) {
        std::span<const double> seg(v.data() + w * len, len);
        est[w] = phase.frame_omega() - stats::uniform_slope(seg, phase.dt());
    }
    const double m = stats::mean(est);
    const double sd = stats::stddev(est);
    return {m, sd, sd / std::abs(m), nwin};
}

}  // namespace seo
