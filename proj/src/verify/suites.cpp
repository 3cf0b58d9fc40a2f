#include <cmath>
#include <map>

#include "criteria.hpp"
#include "devices.hpp"
#include "report.hpp"
#include "seo/adler.hpp"
#include "seo/circle_map.hpp"
#include "seo/constants.hpp"
#include "seo/error.hpp"
#include "seo/full_dynamics.hpp"
#include "seo/rng.hpp"

namespace seo::verify {

namespace {

using CheckFn = CheckResult (*)(const VerifyOptions&);

CheckResult fourier_quadrature(const VerifyOptions&) {
    Report rep("A1", "running-velocity Fourier coefficients", 0.0);
    double worst = 0.0;
    for (double i_b : {1.05, 1.5, 3.0}) {
        const auto c = fourier_coefficients(i_b, 5);
        for (int k = -5; k <= 5; ++k) {
            // V(x) = (i_b^2 - 1) / (i_b + sin x) sampled on a uniform grid.
            const int n = 1 << 14;
            cplx s{0.0, 0.0};
            for (int j = 0; j < n; ++j) {
                const double x = kTwoPi * j / n;
                s += (i_b * i_b - 1.0) / (i_b + std::sin(x)) * std::polar(1.0, -k * x);
            }
            worst = std::max(worst, std::abs(c[k] - s / static_cast<double>(n)));
        }
    }
    rep.below("worst |g_k - quadrature|, |k| <= 5", worst, 1e-8);
    double sum_err = 0.0;
    for (double i_b : {1.05, 1.5, 3.0}) {
        const auto w = comb_line_weights(i_b, 400);
        double s = 0.0;
        for (double v : w) s += v;
        sum_err = std::max(sum_err, std::abs(s - 1.0));
    }
    rep.below("comb weights sum to one", sum_err, 1e-10);
    return rep.finish();
}

CheckResult sensitivity_identity(const VerifyOptions& o) {
    Report rep("A2", "synchronised sensitivity identity", 0.0);
    identity_items(rep, o.seed);
    return rep.finish();
}

CheckResult degradation(const VerifyOptions& o) {
    Report rep("M1", "SEO / synchronised resolution ratio", 0.0);
    degradation_items(rep, o);
    return rep.finish();
}

CheckResult kramers(const VerifyOptions& o) {
    Report rep("M2", "noise-activated slip rate", 0.0);
    const double i_b = 0.5;
    const double barrier = *washboard(i_b, 0.0).barrier;
    const double duration = o.fast ? 1e4 : 4e4;
    const double spread = o.fast ? 3.0 : 2.0;
    std::uint64_t idx = 80;
    for (double frac : {1.0 / 3.0, 1.0 / 4.0}) {
        AdlerParams p;
        p.i_b = i_b;
        p.d_noise = barrier * frac;
        const auto g = integrate_adler(p, std::asin(i_b), duration, 0.01, derive_seed(o.seed, idx++), AdlerRunOptions{5});
        const auto slips = count_phase_slips(g, std::asin(i_b));
        const double rate = static_cast<double>(slips.forward) / duration;
        const double ratio = rate / *washboard(i_b, 0.0, p.d_noise).kramers_rate;
        rep.within("rate / Kramers at D = dU/" + num(1.0 / frac, 2), ratio, 1.0 / spread, spread);
    }
    return rep.finish();
}

CheckResult adler_map_strobe(const VerifyOptions&) {
    Report rep("X1", "Euler-strobed Adler phase vs sine map", 0.0);
    const double tau_d = 0.01;
    double worst = 0.0;
    for (double i_b : {0.6, 1.1, 2.5, -1.3}) {
        AdlerParams p;
        p.i_b = i_b;
        const auto g = integrate_adler(p, 0.3, 2000.0, tau_d, 0);
        const MapSpec m{-i_b * tau_d, tau_d, MapFunction::sine()};
        const auto th = iterate(m, 0.3 + kPi, g.size() - 1);
        for (std::size_t k = 0; k < g.size(); ++k)
            worst = std::max(worst, std::abs(th[k] - kPi - g[k]) / std::max(1.0, std::abs(g[k])));
    }
    rep.below("worst relative path difference", worst, 1e-9);
    return rep.finish();
}

CheckResult lock_width(const VerifyOptions&) {
    Report rep("X2", "full-model 1:1 locking half-width", 0.0);
    const double eps = 0.01;
    const auto d = consistency_device(5.0, 1e-4);
    const auto c = envelope_coefficients(d.cav, d.tm, d.p0, eps * d.p0, d.equilibrium.x);
    // A cosine power modulation forces the lab-frame oscillator at a quarter
    // of the envelope-formula omega_a.
    const double half = *c.omega_a / 4.0;
    FullState init = d.equilibrium;
    init.x += 0.002;
    const auto warm = integrate_full(d.cav, d.tm, DriveProgram{d.p0, 0.0, 1.0}, init, 20.0 / std::abs(c.gamma_big0),
                                     0.05, 0, false);
    const double centre = oscillation_summary(warm, 0.5).frequency;
    const FullState start = warm.values().back();
    LockOptions lo;
    lo.transient_fraction = 0.5;
    auto locked = [&](double offset) {
        const double wd = centre + offset;
        return detect_lock(integrate_full(d.cav, d.tm, DriveProgram{d.p0, eps, wd}, start, 80.0 / *c.omega_a, 0.05, 0,
                                          false),
                           wd, 1, 1, lo)
            .locked;
    };
    for (double sgn : {-1.0, 1.0}) {
        const std::string side = sgn < 0 ? "below" : "above";
        rep.truth("locked at 0.8 x omega_a/4 " + side, locked(0.8 * sgn * half), "drive offset " + num(0.8 * sgn * half, 4));
        rep.truth("unlocked at 1.2 x omega_a/4 " + side, !locked(1.2 * sgn * half), "drive offset " + num(1.2 * sgn * half, 4));
    }
    return rep.finish();
}

const std::map<std::string, std::vector<CheckFn>>& registry() {
    static const std::map<std::string, std::vector<CheckFn>> r{
        {"analytic", {winding_rate, static_formulas, hopf_threshold, fourier_quadrature, sensitivity_identity}},
        {"monte-carlo", {locked_phase_noise, degradation, kramers}},
        {"crossmodule", {adler_map_strobe, envelope_consistency, lock_width, sideband_comb, tongue_geometry,
                         fractional_plateaus}},
        {"squareroot", {square_root_law}},
    };
    return r;
}

std::vector<CheckResult> run_all(const std::vector<CheckFn>& fns, const VerifyOptions& opts, const ResultSink& sink) {
    std::vector<CheckResult> out;
    for (auto fn : fns) {
        auto r = fn(opts);
        if (sink) sink(r);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

std::vector<std::string> suite_names() {
    std::vector<std::string> names;
    for (const auto& [name, fns] : registry()) names.push_back(name);
    return names;
}

std::vector<CheckResult> run_suite(const std::string& suite, const VerifyOptions& opts, const ResultSink& sink) {
    const auto it = registry().find(suite);
    if (it == registry().end()) {
        std::string known;
        for (const auto& n : suite_names()) known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("unknown verify suite '" + suite + "' (known: " + known + ")");
    }
    return run_all(it->second, opts, sink);
}

std::vector<CheckResult> run_acceptance(const VerifyOptions& opts, const ResultSink& sink) {
    static const std::vector<CheckFn> criteria{tongue_geometry,    sideband_comb,     winding_rate,      square_root_law,
                                               fractional_plateaus, locked_phase_noise, sensitivity_chain,
                                               envelope_consistency, hopf_threshold,  static_formulas};
    VerifyOptions full = opts;
    full.fast = false;
    return run_all(criteria, full, sink);
}

}  // namespace seo::verify
