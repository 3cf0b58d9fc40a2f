#include <algorithm>
#include <numeric>
#include <cmath>
#include <random>

#include "criteria.hpp"
#include "devices.hpp"
#include "report.hpp"
#include "seo/adler.hpp"
#include "seo/constants.hpp"
#include "seo/envelope.hpp"
#include "seo/full_dynamics.hpp"
#include "seo/rng.hpp"
#include "seo/stats.hpp"

namespace seo::verify {

namespace {

struct PlateauRun {
    const DesignedDevice& dev;
    FullState start;
    double base;   // drive frequency at the nominal p/q ratio
    long p, q;
    double eps;

    [[nodiscard]] LockReport at(double rel) const {
        constexpr double kDuration = 1.5e5;
        constexpr double kDt = 0.05;
        LockOptions lo;
        lo.transient_fraction = 0.5;
        const double wd = base * (1.0 + rel);
        const auto tr = integrate_full(dev.cav, dev.tm, DriveProgram{dev.p0, eps, wd}, start, kDuration, kDt, 0, false);
        return detect_lock(tr, wd, p, q, lo);
    }

    // Bisects between a locked and an unlocked relative detuning; returns the final bracket.
    [[nodiscard]] std::pair<double, double> edge(double locked, double unlocked) const {
        for (int it = 0; it < 22; ++it) {
            const double mid = 0.5 * (locked + unlocked);
            (at(mid).locked ? locked : unlocked) = mid;
        }
        return {locked, unlocked};
    }

    // Exponent of |w - p/q| against the distance outside the edge.
    [[nodiscard]] double departure_exponent(double edge_rel, double sgn) const {
        std::vector<double> x, y;
        for (double d : stats::logspace(1e-5, 1e-3, 7)) {
            const auto r = at(edge_rel + sgn * d);
            const double dep = r.slip_departure.value_or(
                std::abs(r.winding - static_cast<double>(p) / static_cast<double>(q)));
            if (!(dep > 0.0)) continue;
            x.push_back(d);
            y.push_back(dep);
        }
        if (x.size() < 3) return std::nan("");
        return stats::fit_power_law(x, y).slope;
    }
};

}  // namespace

CheckResult fractional_plateaus(const VerifyOptions&) {
    Report rep("C5", "fractional plateaus", 900.0);
    const auto dev = plateau_device();
    FullState init = dev.equilibrium;
    init.x += 0.001;
    FullRunOptions warm_opts;
    warm_opts.record_start = 1e5;
    const auto warm = integrate_full(dev.cav, dev.tm, DriveProgram{dev.p0, 0.0, 1.0}, init, 1.5e5, 0.05, 0, false,
                                     warm_opts);
    const double free_freq = oscillation_summary(warm, 0.0).frequency;
    rep.note("free oscillation frequency", num(free_freq, 8));

    struct Case { long p, q; double eps; const char* name; };
    for (const Case c : {Case{1, 1, 0.03, "1"}, Case{1, 2, 0.3, "1/2"}, Case{1, 3, 0.3, "1/3"}}) {
        const PlateauRun run{dev, warm.values().back(), free_freq * static_cast<double>(c.q) / static_cast<double>(c.p),
                             c.p, c.q, c.eps};
        const std::string tag = std::string(c.name) + " plateau";
        const bool centre = run.at(0.0).locked;
        const bool outside = !run.at(-0.01).locked && !run.at(0.01).locked;
        rep.truth(tag + " bracketed", centre && outside,
                  std::string("centre ") + (centre ? "locked" : "unlocked") + ", +/-1% " + (outside ? "unlocked" : "locked"));
        if (!(centre && outside)) continue;

        const auto lo = run.edge(0.0, -0.01);
        const auto hi = run.edge(0.0, 0.01);
        const double lower = 0.5 * (lo.first + lo.second);
        const double upper = 0.5 * (hi.first + hi.second);
        const double target = static_cast<double>(c.p) / static_cast<double>(c.q);
        double spread = 0.0;
        for (double f : {0.2, 0.35, 0.5, 0.65, 0.8})
            spread = std::max(spread, std::abs(run.at(lower + f * (upper - lower)).winding - target));
        rep.note(tag + " edges (relative drive detuning)", "[" + num(lower, 6) + ", " + num(upper, 6) + "]");
        rep.below(tag + " max |winding - p/q| inside", spread, 1e-4);
        rep.near(tag + " lower-edge exponent", run.departure_exponent(lower, -1.0), 0.5, 0.05);
        rep.near(tag + " upper-edge exponent", run.departure_exponent(upper, 1.0), 0.5, 0.05);
    }
    return rep.finish();
}

void identity_items(Report& rep, std::uint64_t seed) {
    // delta_Omega / Omega_H against sigma_fo over random physical devices.
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double m = u(gen) * 1e-12, w0 = u(gen) * 1e6, g0 = u(gen) * 10.0, t = u(gen) * 30.0,
                     r0 = u(gen) * 1e-8, t_a = u(gen), wa = u(gen) * 50.0, i_b = 0.19 * u(gen) - 0.95;
        const double theta = g0 * kBoltzmann * t / (4.0 * m * w0 * w0);
        AdlerParams p;
        p.i_b = i_b;
        p.omega_a = wa;
        p.d_noise = AdlerParams::noise_from_physical(theta, wa, r0);
        const double rel = *sync_sensitivity(p, wa * t_a, w0).relative;
        const double fo = sigma_fo(g0, t, stored_energy(m, w0, r0), w0, t_a).sigma;
        worst = std::max(worst, std::abs(rel / fo - 1.0));
    }
    rep.below("(a) worst |delta_Omega/Omega_H / sigma_fo - 1|", worst, 1e-12);
}

void degradation_items(Report& rep, const VerifyOptions& o) {
    // Empirical SEO and synchronised resolutions on one envelope device.
    const double theta = 1e-3, t_a = 50.0, i_b = 0.5;
    const std::size_t windows = o.fast ? 50 : 200;
    const double tol = o.fast ? 0.75 : 0.5;
    std::uint64_t idx = 70;
    for (double omega2 : {9.95, 1.0}) {
        const auto c = EnvelopeCoefficients::from_rates(-1.0, 1.0, 10.0, omega2, theta, 1.0);
        const double r0 = *c.r0;
        const double factor = sigma_seo(1.0, *c.zeta0, c.gamma_big0, c.gamma_big2).degradation;

        // The step guard only ensures stability. Euler on the amplitude-dependent
        // rotation inflates |A| at a rate ~ (Omega2 r0^2)^2 dt / 2, which must stay
        // far below |Gamma0| or the limit cycle and its phase diffusion are biased.
        const double rot = omega2 * r0 * r0;
        const double dt = std::min(0.04 / std::max(1.0, rot), 0.02 * std::abs(c.gamma_big0) / std::max(1e-300, rot * rot));
        EnvelopeRunOptions eo;
        eo.a0 = {r0, 0.0};
        eo.stride = 5;
        const double transient = 20.0;
        const auto a = integrate_envelope(c, std::nullopt, transient + t_a * static_cast<double>(windows), dt,
                                          derive_seed(o.seed, idx++), eo);
        const auto pol = to_polar(a.tail(static_cast<std::size_t>(transient / a.dt())));
        const double sigma_seo_emp = frequency_estimator(pol.phase, t_a).stddev / c.omega_h;

        AdlerParams p;
        p.i_b = i_b;
        p.omega_a = *c.omega_a;
        p.d_noise = AdlerParams::noise_from_physical(theta, p.omega_a, r0);
        const double tau_a = p.omega_a * t_a;
        const double d_tau = 0.01;
        const auto g = integrate_adler(p, std::asin(i_b), tau_a * static_cast<double>(windows + 1), d_tau,
                                       derive_seed(o.seed, idx++));
        const auto per = static_cast<std::size_t>(std::llround(tau_a / d_tau));
        std::vector<double> means;
        // The first window is discarded as transient.
        for (std::size_t w = 1; (w + 1) * per <= g.size(); ++w) {
            const auto first = g.values().begin() + static_cast<std::ptrdiff_t>(w * per);
            means.push_back(std::accumulate(first, first + static_cast<std::ptrdiff_t>(per), 0.0) /
                            static_cast<double>(per));
        }
        const double resp = p.omega_a * std::sqrt(1.0 - i_b * i_b);
        const double sigma_sync_emp = resp * stats::stddev(means) / c.omega_h;
        const double sigma_sync = *sync_sensitivity(p, tau_a, c.omega_h).relative;

        const std::string tag = "(b) factor " + num(factor, 3);
        rep.note(tag + " sigma SEO / sync (empirical)", num(sigma_seo_emp, 4) + " / " + num(sigma_sync_emp, 4) +
                                                            ", sync formula " + num(sigma_sync, 4));
        rep.rel(tag + " empirical ratio", sigma_seo_emp / sigma_sync_emp, factor, tol);
    }
}

CheckResult sensitivity_chain(const VerifyOptions& o) {
    Report rep("C7", "sensitivity chain", 600.0);
    identity_items(rep, o.seed);
    degradation_items(rep, o);
    return rep.finish();
}

CheckResult envelope_consistency(const VerifyOptions&) {
    Report rep("C8", "envelope / full-model consistency", 300.0);
    const auto d = consistency_device(1.0, 1e-3);
    rep.truth("envelope validity checks", check_validity(d.cav, d.tm, d.equilibrium.x).ok(), "all three orderings hold");
    FullState init = d.equilibrium;
    init.x += 0.002;
    const double duration = 40.0 / std::abs(d.coeffs.gamma_big0);
    const auto s = integrate_full(d.cav, d.tm, DriveProgram{d.p0, 0.0, 1.0}, init, duration, 0.05, 0, false);
    const auto sum = oscillation_summary(s, 0.5);
    rep.rel("amplitude vs 2 r0", sum.amplitude, 2.0 * *d.coeffs.r0, 0.05);
    rep.rel("frequency vs Omega_H", sum.frequency, d.coeffs.omega_h, 1e-3);
    return rep.finish();
}

CheckResult hopf_threshold(const VerifyOptions&) {
    Report rep("C9", "Hopf threshold", 60.0);
    const auto d = consistency_device(1.0, 1e-3);
    const double r_ref = *d.coeffs.r0;
    std::size_t below = 0, above = 0;
    double worst_decay = 0.0, worst_amp = 0.0;
    for (double f : {0.2, 0.35, 0.45, 0.6, 0.8, 1.0, 1.3, 1.7}) {
        const double p0 = f * d.p0;
        const double x = static_equilibrium(d.cav, d.tm, p0, d.equilibrium.x).x;
        const auto c = envelope_coefficients(d.cav, d.tm, p0, 0.0, x);
        if (std::abs(c.gamma_big0) < 0.1 * d.tm.gamma0) continue;   // too slow to settle
        auto noiseless = c;
        noiseless.theta_noise = 0.0;
        EnvelopeRunOptions eo;
        // Only the final sample matters; keep about a hundred.
        // Same accuracy rule for the Euler rotation as in the sensitivity runs.
        auto step = [&](double duration, double rate, double r) {
            const double rot = std::abs(c.omega_big2) * r * r;
            const double dt = std::min({0.02 / rate, 0.02 * std::abs(c.gamma_big0) / std::max(1e-300, rot * rot),
                                        duration / 2000.0});
            eo.stride = static_cast<std::size_t>(duration / dt) / 100 + 1;
            return dt;
        };
        if (c.gamma_big0 > 0.0) {
            eo.a0 = {r_ref, 0.0};
            const double rate = std::max({c.gamma_big0, c.gamma_big2 * r_ref * r_ref, std::abs(c.omega_big2) * r_ref * r_ref});
            const double duration = 10.0 / c.gamma_big0;
            const auto a = integrate_envelope(noiseless, std::nullopt, duration, step(duration, rate, r_ref), 0, eo);
            worst_decay = std::max(worst_decay, std::abs(a.values().back()) / r_ref);
            ++below;
        } else {
            const double r0 = *c.r0;
            eo.a0 = {0.1 * r0, 0.0};
            const double rate = std::max({-c.gamma_big0, c.gamma_big2 * r0 * r0, std::abs(c.omega_big2) * r0 * r0});
            const double duration = 20.0 / -c.gamma_big0;
            const auto a = integrate_envelope(noiseless, std::nullopt, duration, step(duration, rate, r0), 0, eo);
            worst_amp = std::max(worst_amp, std::abs(std::abs(a.values().back()) / r0 - 1.0));
            ++above;
        }
    }
    rep.truth("sweep crosses the threshold", below >= 2 && above >= 2,
              std::to_string(below) + " points below, " + std::to_string(above) + " above");
    rep.below("Gamma0 > 0: worst final |A| / initial", worst_decay, 1e-3);
    rep.below("Gamma0 < 0: worst | |A|/r0 - 1 |", worst_amp, 0.01);
    return rep.finish();
}

CheckResult static_formulas(const VerifyOptions& o) {
    Report rep("C10", "static formulas", 5.0);
    rep.near("FSR at device constants (pm)", fsr(CavityParams{}) * 1e12, 80.0, 2.5);
    rep.near("washboard barrier at i_b = 0", *washboard(0.0, 0.0).barrier, 2.0, 1e-12);

    std::mt19937_64 gen(o.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst1 = 0.0, worst2 = 0.0;
    for (int i = 0; i < 200; ++i) {
        CavityParams c;
        c.t_b = 0.05 + 0.4 * u(gen);
        c.t_a = 0.3 * u(gen);
        c.t_r = 0.3 * u(gen);
        c.finesse = 0.5 + 5.0 * u(gen);
        c.lambda = 1.0;
        c.x_r = u(gen);
        const double x = u(gen);
        const double h = 1e-5 * c.lambda;
        const auto dd = intensity_derivatives(c, x);
        // Scales: the fringe maximum of I and its slope and curvature bounds.
        const double k = 4.0 * kPi / c.lambda;
        const double scale1 = intensity(c, c.x_r) * k / std::sqrt(c.beta_plus2());
        const double scale2 = intensity(c, c.x_r) * k * k / c.beta_plus2();
        const double fd1 = (intensity(c, x + h) - intensity(c, x - h)) / (2.0 * h);
        const double fd2 = (intensity_derivatives(c, x + h).d1 - intensity_derivatives(c, x - h).d1) / (2.0 * h);
        worst1 = std::max(worst1, std::abs(dd.d1 - fd1) / scale1);
        worst2 = std::max(worst2, std::abs(dd.d2 - fd2) / scale2);
    }
    rep.below("dI/dx vs central difference (scaled)", worst1, 1e-6);
    rep.below("d2I/dx2 vs central difference (scaled)", worst2, 1e-6);
    return rep.finish();
}

}  // namespace seo::verify
