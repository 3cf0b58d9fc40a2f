#include "seo/full_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>

#include "seo/adler.hpp"
#include "seo/constants.hpp"
#include "seo/error.hpp"
#include "seo/rng.hpp"
#include "seo/stats.hpp"

namespace seo {

void DriveProgram::validate() const {
    if (!(p0 >= 0.0)) throw ParameterError("drive: p0 must be non-negative");
    if (!(eps >= 0.0 && eps < 1.0)) throw ParameterError("drive: eps must lie in [0, 1)");
    if (!std::isfinite(omega_d)) throw ParameterError("drive: omega_d must be finite");
}

FullState static_equilibrium(const CavityParams& cav, const ThermoMechParams& tm, double p0, double hint) {
    tm.validate();
    const IntensityProfile intens(cav);
    const double gain = tm.eta * p0 / tm.kappa;
    auto temp = [&](double x) { return gain * intens(x); };
    auto x_of_t = [&](double t) {
        const double w = tm.omega0 - tm.beta * t;
        return tm.theta * t / (w * w);
    };
    auto g = [&](double x) { return x_of_t(temp(x)) - x; };

    // Every root has x = x_of_t(T) for T between the extreme temperatures,
    // which bounds the search interval.
    const double bp2 = cav.beta_plus2();
    const double amp = cav.finesse * (bp2 - cav.beta_minus2());
    const double t_a = gain * amp / (2.0 + bp2), t_b = gain * amp / bp2;
    double lo = 0.0, hi = 0.0;
    constexpr int kTempGrid = 257;
    for (int k = 0; k < kTempGrid; ++k) {
        const double t = t_a + (t_b - t_a) * k / (kTempGrid - 1);
        if (!(tm.omega0 - tm.beta * t > 0.0))
            throw PreconditionError("static_equilibrium: beta T reaches omega0, no static working point");
        const double x = x_of_t(t);
        if (k == 0 || x < lo) lo = x;
        if (k == 0 || x > hi) hi = x;
    }
    if (hi - lo <= 1e-15 * cav.lambda) return {lo, 0.0, temp(lo)};

    // Scan finely enough to separate roots one fringe apart, then bisect.
    const double step = cav.lambda / 2.0 / 512.0;
    const auto n = static_cast<std::size_t>(std::min(4.0e6, std::ceil((hi - lo) / step) + 1.0));
    const double h = (hi - lo) / static_cast<double>(n);
    std::optional<double> best;
    double prev_x = lo, prev_g = g(lo);
    for (std::size_t k = 1; k <= n; ++k) {
        const double x = lo + h * static_cast<double>(k);
        const double gx = g(x);
        double root;
        bool found = false;
        if (prev_g == 0.0) {
            root = prev_x;
            found = true;
        } else if ((prev_g < 0.0) != (gx < 0.0)) {
            double a = prev_x, b = x, ga = prev_g;
            for (int it = 0; it < 200 && b - a > 1e-15 * std::max(std::abs(a), cav.lambda); ++it) {
                const double m = 0.5 * (a + b);
                const double gm = g(m);
                if ((gm < 0.0) == (ga < 0.0)) { a = m; ga = gm; } else { b = m; }
            }
            root = 0.5 * (a + b);
            found = true;
        }
        if (found && (!best || std::abs(root - hint) < std::abs(*best - hint))) best = root;
        prev_x = x;
        prev_g = gx;
    }
    if (!best) throw PreconditionError("static_equilibrium: no static working point found");
    return {*best, 0.0, temp(*best)};
}

namespace {

struct Rhs {
    const ThermoMechParams& tm;
    IntensityProfile intens;
    DriveProgram drive;
    double x_eq;

    FullState operator()(double t, const FullState& s) const {
        const double power = drive.p0 * (1.0 + drive.eps * std::cos(drive.omega_d * t));
        const double w = tm.omega0 - tm.beta * s.t_rel;
        const double dx = s.x - x_eq;
        const double acc = -2.0 * tm.gamma0 * s.v - 2.0 * tm.gamma2 * dx * dx * s.v - w * w * s.x + tm.theta * s.t_rel;
        return {s.v, acc, tm.eta * power * intens(s.x) - tm.kappa * s.t_rel};
    }
};

FullState axpy(const FullState& a, double h, const FullState& k) {
    return {a.x + h * k.x, a.v + h * k.v, a.t_rel + h * k.t_rel};
}

}  // namespace

StateSeries integrate_full(const CavityParams& cav, const ThermoMechParams& tm, const DriveProgram& drive,
                           const FullState& init, double duration, double dt, std::uint64_t seed, bool noise_on,
                           const FullRunOptions& opts) {
    tm.validate();
    drive.validate();
    if (!(dt > 0.0) || dt * tm.omega0 >= 0.1 || dt * tm.kappa >= 0.1)
        throw PreconditionError("integrate_full: step guard requires dt*omega0 < 0.1 and dt*kappa < 0.1");
    if (!(duration >= dt)) throw PreconditionError("integrate_full: duration shorter than one step");
    if (opts.stride == 0) throw ParameterError("integrate_full: stride must be >= 1");

    const double x_eq = tm.gamma2 > 0.0 ? static_equilibrium(cav, tm, drive.p0, init.x).x : 0.0;
    const Rhs f{tm, IntensityProfile(cav), drive, x_eq};
    const auto steps = static_cast<std::size_t>(std::llround(duration / dt));
    const auto first = static_cast<std::size_t>(std::ceil(std::max(0.0, opts.record_start) / dt));
    if (first > steps) throw PreconditionError("integrate_full: record_start beyond duration");

    std::vector<FullState> out;
    out.reserve((steps - first) / opts.stride + 1);
    GaussianSource gauss(seed);
    const double kick = std::sqrt(4.0 * tm.gamma0 * kBoltzmann * tm.t_eff * dt / tm.m);

    FullState s = init;
    std::size_t first_stored = 0;
    bool stored_any = false;
    auto maybe_store = [&](std::size_t n) {
        if (n >= first && (n - first) % opts.stride == 0) {
            if (!stored_any) { first_stored = n; stored_any = true; }
            out.push_back(s);
        }
    };
    maybe_store(0);
    for (std::size_t n = 0; n < steps; ++n) {
        const double t = static_cast<double>(n) * dt;
        const FullState k1 = f(t, s);
        const FullState k2 = f(t + 0.5 * dt, axpy(s, 0.5 * dt, k1));
        const FullState k3 = f(t + 0.5 * dt, axpy(s, 0.5 * dt, k2));
        const FullState k4 = f(t + dt, axpy(s, dt, k3));
        s.x += dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
        s.v += dt / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
        s.t_rel += dt / 6.0 * (k1.t_rel + 2.0 * k2.t_rel + 2.0 * k3.t_rel + k4.t_rel);
        if (noise_on) s.v += kick * gauss();
        if (!std::isfinite(s.x) || !std::isfinite(s.v) || !std::isfinite(s.t_rel))
            throw DivergenceError("integrate_full: non-finite state at t = " + std::to_string(t + dt), t + dt);
        maybe_store(n + 1);
    }
    return StateSeries(dt * static_cast<double>(opts.stride), std::move(out), seed,
                       static_cast<double>(first_stored) * dt);
}

namespace {

struct Crossings {
    std::vector<double> times;   // upward zero crossings of x - mean
    double mean;
    double amplitude;            // max |x - mean| in the analysed part
};

Crossings upward_crossings(const StateSeries& traj, std::size_t begin) {
    const auto& v = traj.values();
    double m = 0.0;
    for (std::size_t i = begin; i < v.size(); ++i) m += v[i].x;
    m /= static_cast<double>(v.size() - begin);
    Crossings c{{}, m, 0.0};
    for (std::size_t i = begin; i < v.size(); ++i) c.amplitude = std::max(c.amplitude, std::abs(v[i].x - m));
    for (std::size_t i = begin + 1; i < v.size(); ++i) {
        const double a = v[i - 1].x - m, b = v[i].x - m;
        if (a < 0.0 && b >= 0.0) c.times.push_back(traj.time(i - 1) + traj.dt() * a / (a - b));
    }
    return c;
}

}  // namespace

LockReport detect_lock(const StateSeries& traj, double omega_d, long p, long q, const LockOptions& opts) {
    if (!(omega_d > 0.0) || q < 1) throw ParameterError("detect_lock: need omega_d > 0 and q >= 1");
    const auto& v = traj.values();
    const auto begin = static_cast<std::size_t>(opts.transient_fraction * static_cast<double>(v.size()));
    const double period_d = kTwoPi / omega_d;
    const double span = static_cast<double>(v.size() - 1 - std::min(begin, v.size() - 1)) * traj.dt();
    if (span < static_cast<double>(opts.min_periods) * period_d)
        throw PreconditionError("detect_lock: fewer than " + std::to_string(opts.min_periods) +
                                " drive periods after the transient");

    double overall = 0.0;
    for (const auto& s : v) overall = std::max(overall, std::abs(s.x));
    const Crossings c = upward_crossings(traj, begin);
    if (c.times.size() < 3 || c.amplitude < 1e-3 * std::max(overall, std::abs(c.mean)))
        throw PreconditionError("detect_lock: no oscillation (ambiguous phase)");

    // Piecewise-linear oscillator phase between crossings; strobe on the drive grid.
    const double t_first = c.times.front(), t_last = c.times.back();
    const auto n0 = static_cast<long long>(std::ceil(t_first / period_d));
    std::vector<double> phase;
    std::size_t j = 0;
    for (long long n = n0;; ++n) {
        const double s = static_cast<double>(n) * period_d;
        if (s >= t_last) break;
        while (j + 1 < c.times.size() && c.times[j + 1] <= s) ++j;
        const double frac = (s - c.times[j]) / (c.times[j + 1] - c.times[j]);
        phase.push_back(kTwoPi * (static_cast<double>(j) + frac));
    }
    if (phase.size() < 2) throw PreconditionError("detect_lock: too few strobes");

    LockReport r;
    r.omega_d = omega_d;
    r.seed = traj.seed();
    r.strobes = phase.size();
    // Whole multiples of q strobes, so a locked p/q orbit reads exactly p/q.
    const std::size_t qs = static_cast<std::size_t>(q);
    const std::size_t span_n = (phase.size() - 1) >= qs ? (phase.size() - 1) / qs * qs : phase.size() - 1;
    r.winding = (phase[span_n] - phase.front()) / (kTwoPi * static_cast<double>(span_n));
    r.mean_freq = kTwoPi * static_cast<double>(c.times.size() - 1) / (t_last - t_first);

    const double ratio = static_cast<double>(p) / static_cast<double>(q);
    std::vector<double> resid(phase.size());
    for (std::size_t n = 0; n < phase.size(); ++n) resid[n] = phase[n] - kTwoPi * ratio * static_cast<double>(n);
    r.phase_var = stats::variance(resid);
    r.locked = std::abs(r.winding - ratio) < opts.winding_tol && r.phase_var < opts.phase_var_tol;

    const auto slips = count_phase_slips(RealSeries(1.0, resid), resid.front());
    if (slips.times.size() >= 2)
        r.slip_departure = static_cast<double>(slips.times.size() - 1) / (slips.times.back() - slips.times.front());
    return r;
}

OscillationSummary oscillation_summary(const StateSeries& traj, double transient_fraction) {
    const auto& v = traj.values();
    const auto begin = static_cast<std::size_t>(transient_fraction * static_cast<double>(v.size()));
    const Crossings c = upward_crossings(traj, begin);
    if (c.times.size() < 3) throw PreconditionError("oscillation_summary: fewer than three zero crossings");
    // Mean half peak-to-peak over complete cycles between crossings.
    double acc = 0.0;
    std::size_t cycles = 0;
    std::size_t i = begin;
    for (std::size_t k = 0; k + 1 < c.times.size(); ++k) {
        double hi = -1e300, lo = 1e300;
        while (i < v.size() && traj.time(i) < c.times[k]) ++i;
        std::size_t jj = i;
        while (jj < v.size() && traj.time(jj) < c.times[k + 1]) {
            hi = std::max(hi, v[jj].x);
            lo = std::min(lo, v[jj].x);
            ++jj;
        }
        if (hi > lo) { acc += 0.5 * (hi - lo); ++cycles; }
        i = jj;
    }
    const double freq = kTwoPi * static_cast<double>(c.times.size() - 1) / (c.times.back() - c.times.front());
    return {acc / static_cast<double>(cycles), freq, c.mean};
}

std::vector<LockReport> lock_staircase(const CavityParams& cav, const ThermoMechParams& tm, const DriveProgram& base,
                                       const std::vector<double>& omega_ds, long p, long q,
                                       const LockSweepConfig& cfg, ExecPolicy policy) {
    return map_indexed(policy, omega_ds.size(), [&](std::size_t i) {
        DriveProgram d = base;
        d.omega_d = omega_ds[i];
        const std::uint64_t seed = derive_seed(cfg.seed, i);
        const auto traj = integrate_full(cav, tm, d, cfg.init, cfg.duration, cfg.dt, seed, cfg.noise_on);
        LockReport r = detect_lock(traj, d.omega_d, p, q, cfg.lock);
        r.eps = d.eps;
        return r;
    });
}

void write_lock_csv_header(std::ostream& os) { os << "omega_d,eps,winding,locked,mean_freq,phase_var,seed\n"; }

void write_lock_csv_row(std::ostream& os, const LockReport& r) {
    os << format_double(r.omega_d) << ',' << format_double(r.eps) << ',' << format_double(r.winding) << ','
       << (r.locked ? 1 : 0) << ',' << format_double(r.mean_freq) << ',' << format_double(r.phase_var) << ','
       << r.seed << '\n';
}

void write_csv(std::ostream& os, const StateSeries& ts) {
    os << "# dt=" << format_double(ts.dt()) << " seed=" << ts.seed() << " t0=" << format_double(ts.t0())
       << " kind=full\n# x,v,t_rel\n";
    for (const auto& s : ts.values())
        os << format_double(s.x) << ',' << format_double(s.v) << ',' << format_double(s.t_rel) << '\n';
}

}  // namespace seo
