#include "seo/circle_map.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "seo/adler.hpp"
#include "seo/constants.hpp"
#include "seo/error.hpp"
#include "seo/time_series.hpp"

namespace seo {

namespace {

constexpr std::size_t kComposeGrid = 4096;
constexpr long kMaxDenominator = 16;

// theta - theta_c wrapped into [-pi, pi)
double wrap_offset(double theta, double theta_c) {
    double d = std::fmod(theta - theta_c + kPi, kTwoPi);
    if (d < 0.0) d += kTwoPi;
    return d - kPi;
}

struct Lagrange4 {
    std::size_t i;   // base index (mod n)
    double w[4];
    double dw[4];
};

Lagrange4 lagrange_weights(double theta, std::size_t n) {
    const double h = kTwoPi / static_cast<double>(n);
    double x = std::fmod(theta, kTwoPi);
    if (x < 0.0) x += kTwoPi;
    x /= h;
    double fl = std::floor(x);
    double t = x - fl;
    auto i = static_cast<std::size_t>(fl) % n;
    Lagrange4 l{};
    l.i = i;
    l.w[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
    l.w[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    l.w[2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
    l.w[3] = (t + 1.0) * t * (t - 1.0) / 6.0;
    l.dw[0] = -(3.0 * t * t - 6.0 * t + 2.0) / 6.0 / h;
    l.dw[1] = (3.0 * t * t - 4.0 * t - 1.0) / 2.0 / h;
    l.dw[2] = -(3.0 * t * t - 2.0 * t - 2.0) / 2.0 / h;
    l.dw[3] = (3.0 * t * t - 1.0) / 6.0 / h;
    return l;
}

double table_at(const std::vector<double>& tab, std::size_t base, int offset) {
    const auto n = static_cast<long>(tab.size());
    long k = (static_cast<long>(base) + offset) % n;
    if (k < 0) k += n;
    return tab[static_cast<std::size_t>(k)];
}

// Residual of the q-fold map against a drop of 2 pi p.
double lock_residual(const MapSpec& spec, long p, long q, double theta) {
    double th = theta;
    for (long j = 0; j < q; ++j) th = spec.step(th);
    return th - theta + kTwoPi * static_cast<double>(p);
}

struct Extremes {
    double lo;
    double hi;
};

double golden_extreme(const MapSpec& spec, long p, long q, double a, double b, bool maximize) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    auto f = [&](double th) {
        const double v = lock_residual(spec, p, q, th);
        return maximize ? -v : v;
    };
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 80 && (b - a) > 1e-13; ++it) {
        if (fc < fd) { b = d; d = c; fd = fc; c = b - g * (b - a); fc = f(c); }
        else { a = c; c = d; fc = fd; d = a + g * (b - a); fd = f(d); }
    }
    const double v = lock_residual(spec, p, q, 0.5 * (a + b));
    return v;
}

Extremes residual_extremes(const MapSpec& spec, long p, long q) {
    constexpr std::size_t n = 2048;
    const double h = kTwoPi / static_cast<double>(n);
    std::size_t imin = 0, imax = 0;
    double vmin = 0.0, vmax = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double v = lock_residual(spec, p, q, h * static_cast<double>(k));
        if (k == 0 || v < vmin) { vmin = v; imin = k; }
        if (k == 0 || v > vmax) { vmax = v; imax = k; }
    }
    const double tmin = h * static_cast<double>(imin), tmax = h * static_cast<double>(imax);
    const double lo = std::min(vmin, golden_extreme(spec, p, q, tmin - h, tmin + h, false));
    const double hi = std::max(vmax, golden_extreme(spec, p, q, tmax - h, tmax + h, true));
    return {lo, hi};
}

}  // namespace

MapFunction MapFunction::sine() { return MapFunction{}; }

MapFunction MapFunction::quadratic_cap(double alpha_c, double theta_c, double z) {
    if (!(z > 0.0)) throw ParameterError("quadratic-cap map: z must be positive");
    MapFunction f;
    f.kind_ = Kind::QuadraticCap;
    f.alpha_c_ = alpha_c;
    f.theta_c_ = theta_c;
    f.z_ = z;
    return f;
}

MapFunction MapFunction::tabulated(std::vector<double> samples) {
    if (samples.size() < 4) throw ParameterError("tabulated map: need at least 4 samples");
    MapFunction f;
    f.kind_ = Kind::Tabulated;
    f.table_ = std::make_shared<const std::vector<double>>(std::move(samples));
    return f;
}

double MapFunction::term(double w_a, double theta) const {
    switch (kind_) {
        case Kind::Sine: return w_a * std::sin(theta);
        case Kind::QuadraticCap: {
            if (w_a == 0.0) return 0.0;
            const double d = wrap_offset(theta, theta_c_);
            return alpha_c_ * (1.0 - z_ * z_ * d * d);
        }
        case Kind::Tabulated: {
            const auto& tab = *table_;
            const auto l = lagrange_weights(theta, tab.size());
            double v = 0.0;
            for (int j = 0; j < 4; ++j) v += l.w[j] * table_at(tab, l.i, j - 1);
            return w_a * v;
        }
    }
    return 0.0;
}

double MapFunction::term_slope(double w_a, double theta) const {
    switch (kind_) {
        case Kind::Sine: return w_a * std::cos(theta);
        case Kind::QuadraticCap: {
            if (w_a == 0.0) return 0.0;
            const double d = wrap_offset(theta, theta_c_);
            return -2.0 * alpha_c_ * z_ * z_ * d;
        }
        case Kind::Tabulated: {
            const auto& tab = *table_;
            const auto l = lagrange_weights(theta, tab.size());
            double v = 0.0;
            for (int j = 0; j < 4; ++j) v += l.dw[j] * table_at(tab, l.i, j - 1);
            return w_a * v;
        }
    }
    return 0.0;
}

std::vector<double> iterate(const MapSpec& spec, double theta0, std::size_t n_steps) {
    if (n_steps < 1) throw PreconditionError("iterate: n_steps must be >= 1");
    std::vector<double> out(n_steps + 1);
    out[0] = theta0;
    for (std::size_t n = 0; n < n_steps; ++n) out[n + 1] = spec.step(out[n]);
    return out;
}

std::optional<FixedPoint> fixed_point(const MapSpec& spec) {
    auto make = [&](double th) {
        const double mult = 1.0 + spec.fn.term_slope(spec.w_a, th);
        return FixedPoint{th, mult, std::abs(mult) < 1.0};
    };
    switch (spec.fn.kind()) {
        case MapFunction::Kind::Sine: {
            if (spec.w_a == 0.0 || std::abs(spec.alpha) > spec.w_a) return std::nullopt;
            // pi - asin is the branch where 1 + W cos(theta) < 1.
            return make(kPi - std::asin(spec.alpha / spec.w_a));
        }
        case MapFunction::Kind::QuadraticCap: {
            const double ac = spec.fn.alpha_c();
            if (spec.w_a == 0.0 || spec.alpha > ac) return std::nullopt;
            const double d = std::sqrt(1.0 - spec.alpha / ac) / spec.fn.z();
            if (d > kPi) return std::nullopt;
            return make(spec.fn.theta_c() + d);
        }
        case MapFunction::Kind::Tabulated: break;
    }
    // Bracket sign changes of W_a F - alpha on a uniform grid, then bisect.
    auto g = [&](double th) { return spec.fn.term(spec.w_a, th) - spec.alpha; };
    std::optional<FixedPoint> first;
    const double h = kTwoPi / static_cast<double>(kComposeGrid);
    for (std::size_t k = 0; k < kComposeGrid; ++k) {
        double a = h * static_cast<double>(k), b = a + h;
        double ga = g(a), gb = g(b);
        if (ga == 0.0) { b = a; gb = 0.0; }
        if (ga * gb > 0.0) continue;
        for (int it = 0; it < 100 && gb != 0.0 && (b - a) > 1e-15; ++it) {
            const double m = 0.5 * (a + b);
            const double gm = g(m);
            if ((gm < 0.0) == (ga < 0.0)) { a = m; ga = gm; } else { b = m; gb = gm; }
        }
        const auto fp = make(gb == 0.0 ? b : 0.5 * (a + b));
        if (fp.stable) return fp;
        if (!first) first = fp;
    }
    return first;
}

std::optional<Rational> detect_rational(double w, long max_q, double tol) {
    // Continued-fraction convergents h/k of w.
    long h_prev = 1, h_prev2 = 0, k_prev = 0, k_prev2 = 1;
    double x = w;
    for (int it = 0; it < 64; ++it) {
        const double a = std::floor(x);
        const long ai = static_cast<long>(a);
        const long h = ai * h_prev + h_prev2;
        const long k = ai * k_prev + k_prev2;
        if (k > max_q) break;
        if (std::abs(w - static_cast<double>(h) / static_cast<double>(k)) < tol) return Rational{h, k};
        const double frac = x - a;
        if (frac < 1e-15) break;
        x = 1.0 / frac;
        h_prev2 = h_prev; h_prev = h;
        k_prev2 = k_prev; k_prev = k;
    }
    return std::nullopt;
}

Winding winding_number(const MapSpec& spec, double theta0, std::size_t n_transient, std::size_t n_measure) {
    if (n_measure < 1000) throw PreconditionError("winding_number: n_measure must be >= 1000");
    double th = theta0;
    for (std::size_t n = 0; n < n_transient; ++n) th = spec.step(th);
    std::vector<double> orbit(n_measure + 1);
    orbit[0] = th;
    for (std::size_t n = 1; n <= n_measure; ++n) orbit[n] = th = spec.step(th);
    const double w = (orbit.back() - orbit.front()) / (kTwoPi * static_cast<double>(n_measure));
    // A p/q orbit only winds exactly over whole multiples of q steps, so each
    // candidate denominator is judged on its own truncated window.
    for (long q = 1; q <= kMaxDenominator; ++q) {
        const std::size_t len = n_measure / static_cast<std::size_t>(q) * static_cast<std::size_t>(q);
        const double wq = (orbit[len] - orbit.front()) / (kTwoPi * static_cast<double>(len));
        const auto r = detect_rational(wq, q);
        if (r && r->q == q) return {wq, r};
    }
    return {w, std::nullopt};
}

UnlockTime unlock_time(const MapSpec& spec, double alpha, std::optional<double> omega_d) {
    if (spec.fn.kind() != MapFunction::Kind::QuadraticCap)
        throw PreconditionError("unlock_time: requires the quadratic-cap map");
    const double ac = spec.fn.alpha_c();
    if (!(alpha > ac)) throw PreconditionError("unlock_time: alpha <= alpha_c is locked");
    const double n = kPi / (spec.fn.z() * std::sqrt(ac * (alpha - ac)));
    UnlockTime out{n, std::nullopt};
    if (omega_d) out.sideband = *omega_d / n;
    return out;
}

MapSpec compose(const MapSpec& spec, unsigned p) {
    if (p < 1) throw PreconditionError("compose: p must be >= 1");
    if (p == 1) return spec;
    std::vector<double> resid(kComposeGrid);
    double amp = 0.0;
    for (std::size_t k = 0; k < kComposeGrid; ++k) {
        const double th0 = kTwoPi * static_cast<double>(k) / static_cast<double>(kComposeGrid);
        double th = th0;
        for (unsigned j = 0; j < p; ++j) th = spec.step(th);
        resid[k] = th - th0 + static_cast<double>(p) * spec.alpha;
        amp = std::max(amp, std::abs(resid[k]));
    }
    if (amp > 0.0)
        for (double& v : resid) v /= amp;
    return MapSpec{static_cast<double>(p) * spec.alpha, amp, MapFunction::tabulated(std::move(resid))};
}

std::optional<double> mean_slip_interval(const MapSpec& spec, long p, long q, double theta0,
                                         std::size_t n_transient, std::size_t n_strobes) {
    if (q < 1) throw PreconditionError("mean_slip_interval: q must be >= 1");
    double th = theta0;
    for (std::size_t n = 0; n < n_transient; ++n) th = spec.step(th);
    std::vector<double> y(n_strobes + 1);
    const double drop = kTwoPi * static_cast<double>(p);
    y[0] = th;
    for (std::size_t n = 1; n <= n_strobes; ++n) {
        for (long j = 0; j < q; ++j) th = spec.step(th);
        y[n] = th + drop * static_cast<double>(n);
    }
    const double centre = y[0];
    const auto slips = count_phase_slips(RealSeries(1.0, std::move(y)), centre);
    if (slips.times.size() < 2) return std::nullopt;
    return (slips.times.back() - slips.times.front()) / static_cast<double>(slips.times.size() - 1);
}

TongueEdges tongue_edges(const MapSpec& spec, long p, long q, double alpha_inside, double search_halfwidth) {
    if (q < 1 || !(search_halfwidth > 0.0)) throw PreconditionError("tongue_edges: need q >= 1 and halfwidth > 0");
    auto at = [&](double a) {
        MapSpec s = spec;
        s.alpha = a;
        return residual_extremes(s, p, q);
    };
    const auto inside = at(alpha_inside);
    if (!(inside.lo <= 0.0 && inside.hi >= 0.0))
        throw PreconditionError("tongue_edges: alpha_inside is not on the plateau");

    // Residual decreases with alpha: below the plateau min > 0, above it max < 0.
    auto bisect = [&](double locked, double unlocked, bool lower) {
        for (int it = 0; it < 200 && std::abs(unlocked - locked) > 1e-14 * std::max(1.0, std::abs(locked)); ++it) {
            const double m = 0.5 * (locked + unlocked);
            const auto e = at(m);
            const bool out = lower ? e.lo > 0.0 : e.hi < 0.0;
            (out ? unlocked : locked) = m;
        }
        return 0.5 * (locked + unlocked);
    };
    double lo_out = alpha_inside;
    for (int k = 1;; ++k) {
        lo_out = alpha_inside - search_halfwidth * k;
        if (at(lo_out).lo > 0.0) break;
        if (k > 64) throw PreconditionError("tongue_edges: lower edge not bracketed");
    }
    double hi_out = alpha_inside;
    for (int k = 1;; ++k) {
        hi_out = alpha_inside + search_halfwidth * k;
        if (at(hi_out).hi < 0.0) break;
        if (k > 64) throw PreconditionError("tongue_edges: upper edge not bracketed");
    }
    return {bisect(alpha_inside, lo_out, true), bisect(alpha_inside, hi_out, false)};
}

std::vector<StaircasePoint> winding_staircase(const MapSpec& spec, const std::vector<double>& alphas, double theta0,
                                              std::size_t n_transient, std::size_t n_measure, ExecPolicy policy) {
    return map_indexed(policy, alphas.size(), [&](std::size_t i) {
        MapSpec s = spec;
        s.alpha = alphas[i];
        const auto w = winding_number(s, theta0, n_transient, n_measure);
        StaircasePoint row{alphas[i], s.w_a, w.w, 0, 0};
        if (w.locked) { row.locked_p = w.locked->p; row.locked_q = w.locked->q; }
        return row;
    });
}

void write_staircase_csv(std::ostream& os, const std::vector<StaircasePoint>& rows) {
    os << "alpha,w_a,winding,locked_p,locked_q\n";
    for (const auto& r : rows)
        os << format_double(r.alpha) << ',' << format_double(r.w_a) << ',' << format_double(r.winding) << ','
           << r.locked_p << ',' << r.locked_q << '\n';
}

}  // namespace seo
