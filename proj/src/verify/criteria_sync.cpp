#include <algorithm>
#include <cmath>
#include <numeric>

#include "criteria.hpp"
#include "report.hpp"
#include "seo/adler.hpp"
#include "seo/circle_map.hpp"
#include "seo/constants.hpp"
#include "seo/rng.hpp"
#include "seo/spectral.hpp"
#include "seo/stats.hpp"

namespace seo::verify {

namespace {

// Laboratory locking constants: omega_a / 2 pi = 49.6 Hz, Omega_eff / 2 pi = 236.4 kHz.
constexpr double kOmegaA = kTwoPi * 49.6;
constexpr double kOmegaEff = kTwoPi * 236.4e3;
constexpr std::size_t kLineSpread = 10;   // bins a clipped single line may occupy

AdlerSource lab_source() {
    AdlerSource s;
    s.omega_eff = kOmegaEff;
    s.omega_a = kOmegaA;
    return s;
}

double row_total(const PsdEstimate& p) {
    return std::accumulate(p.power.begin(), p.power.end(), 0.0) * p.bin_width();
}

}  // namespace

CheckResult tongue_geometry(const VerifyOptions& o) {
    Report rep("C1", "tongue geometry", 120.0);
    const double step = 1.2e-3 / 200.0;
    const auto grid = stats::linspace(-6e-4, 6e-4, 201);
    const auto res = sweep_spectrogram(lab_source(), grid, WelchConfig{}, derive_seed(o.seed, 1));
    const auto band = locked_band(res.spectrogram, kLineSpread);
    rep.truth("locked band found", band.has_value(), band ? std::to_string(band->locked_rows) + " single-line rows" : "none");
    if (band) {
        rep.near("half-width / Omega_eff", band->half_width, 2.1e-4, step);
        rep.near("band centre / Omega_eff", 0.5 * (band->lower + band->upper), 0.0, step);
    }
    return rep.finish();
}

CheckResult sideband_comb(const VerifyOptions& o) {
    Report rep("C2", "sideband comb", 60.0);
    const std::vector<double> ibs{1.05, 1.2, 1.5, 3.0};
    std::vector<double> det;
    for (double i : ibs) det.push_back(i * kOmegaA / kOmegaEff);
    const auto res = sweep_spectrogram(lab_source(), det, WelchConfig{}, derive_seed(o.seed, 2));

    double worst_gap = 0.0, worst_db = 0.0;
    bool all_found = true;
    for (std::size_t r = 0; r < ibs.size(); ++r) {
        const double i_b = ibs[r];
        const auto& row = res.rows[r];
        const double ws = *sideband_spacing(kOmegaEff * (1.0 + det[r]), kOmegaEff, kOmegaA) / kTwoPi;
        const auto peaks = extract_sidebands(row, 12, 10.0);
        const auto weights = comb_line_weights(i_b, 3);
        const double total = row_total(row);
        std::vector<double> found;
        for (int k = 0; k <= 3; ++k) {
            const double f = (i_b - k * std::sqrt(i_b * i_b - 1.0)) * kOmegaA / kTwoPi;
            auto near = std::min_element(peaks.begin(), peaks.end(), [&](const Peak& a, const Peak& b) {
                return std::abs(a.freq - f) < std::abs(b.freq - f);
            });
            if (near == peaks.end() || std::abs(near->freq - f) > 0.25 * ws) {
                all_found = false;
                continue;
            }
            found.push_back(near->freq);
            const double db = 10.0 * std::log10(row.band_power(f, 3) / total / weights[static_cast<std::size_t>(k)]);
            worst_db = std::max(worst_db, std::abs(db));
        }
        for (std::size_t k = 1; k < found.size(); ++k)
            worst_gap = std::max(worst_gap, std::abs((found[k - 1] - found[k]) / ws - 1.0));
    }
    rep.truth("lines k = 0..3 resolved", all_found, all_found ? "16 of 16" : "missing lines");
    rep.below("worst relative spacing error", worst_gap, 0.01);
    rep.below("worst line weight error (dB)", worst_db, 1.0);
    return rep.finish();
}

CheckResult winding_rate(const VerifyOptions&) {
    Report rep("C3", "winding rate identity", 30.0);
    double worst = 0.0;
    const auto ibs = stats::logspace(1.02, 5.0, 20);
    for (double i_b : ibs) {
        AdlerParams p;
        p.i_b = i_b;
        // 30 running periods at d_tau = 1e-4, keeping every tenth sample.
        const auto g = integrate_adler(p, 0.0, 30.0 * *period(i_b), 1e-4, 0, AdlerRunOptions{10});
        const double expect = std::sqrt(i_b * i_b - 1.0);
        worst = std::max(worst, std::abs(mean_winding_rate(g) / expect - 1.0));
    }
    rep.below("worst relative error over 20 detunings", worst, 1e-4);
    return rep.finish();
}

CheckResult square_root_law(const VerifyOptions&) {
    Report rep("C4", "square-root law", 120.0);
    const auto deltas = stats::logspace(1e-4, 1e-2, 9);

    std::vector<double> inv;
    for (double d : deltas) {
        AdlerParams p;
        p.i_b = 1.0 + d;
        const auto g = integrate_adler(p, 0.0, 6.0 * *period(p.i_b), 1e-3, 0, AdlerRunOptions{10});
        inv.push_back(mean_winding_rate(g) / kTwoPi);
    }
    rep.near("Adler 1/T_J exponent", stats::fit_power_law(deltas, inv).slope, 0.5, 0.02);

    auto map_exponent = [&](MapSpec spec, double alpha_c) -> std::optional<double> {
        std::vector<double> x, y;
        for (double d : deltas) {
            spec.alpha = alpha_c * (1.0 + d);
            const auto n = mean_slip_interval(spec, 0, 1, 0.0, 1000, 2000000);
            if (!n) return std::nullopt;
            x.push_back(alpha_c * d);
            y.push_back(1.0 / *n);
        }
        return stats::fit_power_law(x, y).slope;
    };
    // Sine map: alpha_c = W_a. Quadratic cap: a small cap keeps the passage
    // outside the bottleneck to a few steps.
    const auto sine = map_exponent(MapSpec{0.0, 0.5, MapFunction::sine()}, 0.5);
    const auto cap = map_exponent(MapSpec{0.0, 1.0, MapFunction::quadratic_cap(0.1, 0.0, 1.0)}, 0.1);
    rep.truth("map slips observed", sine && cap, sine && cap ? "all detunings" : "too few slips");
    if (sine) rep.near("sine map 1/N exponent", *sine, 0.5, 0.02);
    if (cap) rep.near("quadratic cap 1/N exponent", *cap, 0.5, 0.02);
    return rep.finish();
}

CheckResult locked_phase_noise(const VerifyOptions& o) {
    Report rep("C6", "locked-phase noise", 300.0);
    const double d_noise = 0.002;
    const double d_tau = 0.01;
    const double corr_times = o.fast ? 5e3 : 2e4;
    const double tol = o.fast ? 0.2 : 0.1;
    std::uint64_t idx = 0;
    for (double i_b : {0.0, 0.5, 0.9}) {
        const double lam = std::sqrt(1.0 - i_b * i_b);
        AdlerParams p;
        p.i_b = i_b;
        p.d_noise = d_noise;
        // About 2e4 correlation times, sampled every 0.02.
        const auto g = integrate_adler(p, std::asin(i_b), corr_times / lam, d_tau, derive_seed(o.seed, 60 + idx++),
                                       AdlerRunOptions{2});
        const double dt = g.dt();
        const auto max_lag = static_cast<std::size_t>(std::ceil(1.5 / lam / dt));
        const auto cov = stats::autocovariance(g.values(), max_lag);
        std::vector<double> lags, logc;
        for (std::size_t k = 0; k <= max_lag; ++k) {
            const double lag = static_cast<double>(k) * dt;
            if (lag < 0.1 / lam || cov[k] <= 0.0) continue;
            lags.push_back(lag);
            logc.push_back(std::log(cov[k]));
        }
        const std::string tag = "i_b = " + num(i_b, 2);
        rep.rel(tag + " variance", cov[0], correlation(p, 0.0), tol);
        rep.rel(tag + " decay rate", -stats::fit_line(lags, logc).slope, lam, tol);
    }
    return rep.finish();
}

}  // namespace seo::verify
