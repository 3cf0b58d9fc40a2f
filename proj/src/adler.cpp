#include "seo/adler.hpp"

#include <cmath>
#include <string>

#include "seo/constants.hpp"
#include "seo/error.hpp"
#include "seo/rng.hpp"

namespace seo {

namespace {

double sgn(double v) { return v < 0.0 ? -1.0 : 1.0; }

double running_root(double i_b, const char* who) {
    if (!(std::abs(i_b) > 1.0))
        throw PreconditionError(std::string(who) + ": locked regime (|i_b| <= 1) has no running solution");
    return std::sqrt(i_b * i_b - 1.0);
}

double locked_root(double i_b, const char* who) {
    if (!(std::abs(i_b) < 1.0))
        throw PreconditionError(std::string(who) + ": requires the locked regime |i_b| < 1");
    return std::sqrt(1.0 - i_b * i_b);
}

}  // namespace

void AdlerParams::validate() const {
    if (!(d_noise >= 0.0)) throw ParameterError("adler: d_noise must be non-negative");
    if (!(omega_a > 0.0)) throw ParameterError("adler: omega_a must be positive");
    if (!std::isfinite(i_b)) throw ParameterError("adler: i_b must be finite");
}

double AdlerParams::noise_from_physical(double theta_noise, double omega_a, double r0) {
    if (!(omega_a > 0.0) || !(r0 > 0.0) || theta_noise < 0.0)
        throw ParameterError("adler: need omega_a > 0, r0 > 0, Theta >= 0");
    return theta_noise / (omega_a * r0 * r0);
}

std::optional<StationaryPhase> stationary_phase(double i_b) {
    if (std::abs(i_b) > 1.0) return std::nullopt;
    return StationaryPhase{std::asin(i_b), std::sqrt(1.0 - i_b * i_b)};
}

std::optional<double> period(double i_b) {
    if (std::abs(i_b) <= 1.0) return std::nullopt;
    return kTwoPi / std::sqrt(i_b * i_b - 1.0);
}

double gamma_noiseless(double i_b, double tau) {
    const double s = running_root(i_b, "gamma_noiseless");
    const double tj = kTwoPi / s;
    // Reduce tau into [-T_J/2, T_J/2) where the tangent branch is continuous.
    const double m = std::floor((tau + 0.5 * tj) / tj);
    const double tr = tau - m * tj;
    const double base = 2.0 * std::atan((1.0 + s * std::tan(kPi * tr / tj)) / i_b);
    return base + kTwoPi * m * sgn(i_b);
}

double tau_of_gamma(double i_b, double gamma) {
    const double s = running_root(i_b, "tau_of_gamma");
    return 2.0 / s * std::atan((i_b * std::tan(0.5 * gamma) - 1.0) / s);
}

double phase_offset(double i_b) {
    const double s = running_root(i_b, "phase_offset");
    return std::atan(1.0 / s);
}

FourierCoefficients::FourierCoefficients(double i_b, int k_max) : k_max_(k_max) {
    if (k_max < 0) throw ParameterError("fourier_coefficients: k_max must be >= 0");
    const double s = running_root(i_b, "fourier_coefficients");
    const double sg = sgn(i_b);
    const double ratio = i_b - sg * s;
    g_.resize(static_cast<std::size_t>(2 * k_max + 1));
    for (int k = -k_max; k <= k_max; ++k) {
        // i^k, exact for integer k
        static const cplx kPowI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        const cplx ik = kPowI[((k % 4) + 4) % 4];
        g_[static_cast<std::size_t>(k + k_max)] = sg * s * ik * std::pow(ratio, std::abs(k));
    }
}

cplx FourierCoefficients::operator[](int k) const {
    if (std::abs(k) > k_max_) throw PreconditionError("fourier_coefficients: |k| exceeds k_max");
    return g_[static_cast<std::size_t>(k + k_max_)];
}

FourierCoefficients fourier_coefficients(double i_b, int k_max) { return FourierCoefficients(i_b, k_max); }

std::vector<double> comb_line_weights(double i_b, int k_max) {
    const auto g = fourier_coefficients(i_b, k_max);
    const double r = std::abs(i_b) - std::abs(g[0].real());
    std::vector<double> w(static_cast<std::size_t>(k_max + 1));
    w[0] = r * r;
    for (int k = 1; k <= k_max; ++k) w[static_cast<std::size_t>(k)] = 4.0 * std::norm(g[k]);
    return w;
}

std::optional<double> sideband_spacing(double omega_d, double omega_eff, double omega_a) {
    if (!(omega_a > 0.0)) throw ParameterError("sideband_spacing: omega_a must be positive");
    const double det = omega_d - omega_eff;
    if (std::abs(det) < omega_a) return std::nullopt;
    return std::sqrt(det * det - omega_a * omega_a);
}

RealSeries integrate_adler(const AdlerParams& p, double gamma_init, double duration_tau, double d_tau,
                           std::uint64_t seed, const AdlerRunOptions& opts) {
    p.validate();
    if (!(d_tau > 0.0) || d_tau > 0.01 || d_tau * (std::abs(p.i_b) + 1.0) >= 0.1)
        throw PreconditionError("integrate_adler: step guard requires d_tau <= 0.01 and d_tau (|i_b|+1) < 0.1");
    if (!(duration_tau >= d_tau)) throw PreconditionError("integrate_adler: duration shorter than one step");
    if (opts.stride == 0) throw ParameterError("integrate_adler: stride must be >= 1");

    const auto steps = static_cast<std::size_t>(std::llround(duration_tau / d_tau));
    std::vector<double> out;
    out.reserve(steps / opts.stride + 1);
    GaussianSource gauss(seed);
    const double kick = std::sqrt(2.0 * p.d_noise * d_tau);
    const bool noisy = p.d_noise > 0.0;

    double g = gamma_init;
    out.push_back(g);
    for (std::size_t n = 1; n <= steps; ++n) {
        g += d_tau * (p.i_b - std::sin(g));
        if (noisy) g += kick * gauss();
        if (n % opts.stride == 0) out.push_back(g);
    }
    if (!std::isfinite(g)) throw DivergenceError("integrate_adler: non-finite phase", duration_tau);
    return RealSeries(d_tau * static_cast<double>(opts.stride), std::move(out), seed);
}

double phase_noise_psd(const AdlerParams& p, double w) {
    const double c = locked_root(p.i_b, "phase_noise_psd");
    return p.d_noise / kPi / (c * c + w * w);
}

double correlation(const AdlerParams& p, double tau_lag) {
    const double c = locked_root(p.i_b, "correlation");
    return p.d_noise / c * std::exp(-c * std::abs(tau_lag));
}

JitterRate jitter_rate(const AdlerParams& p) {
    p.validate();
    return {p.d_noise, p.omega_a * p.d_noise};
}

SyncSensitivity sync_sensitivity(const AdlerParams& p, double tau_a, std::optional<double> omega_h) {
    p.validate();
    const double c = locked_root(p.i_b, "sync_sensitivity");
    if (!(tau_a > 0.0)) throw ParameterError("sync_sensitivity: tau_a must be positive");
    SyncSensitivity s{};
    s.delta_gamma = std::sqrt(2.0 * kPi * phase_noise_psd(p, 0.0) / tau_a);
    s.responsivity = p.omega_a * c;
    s.delta_omega = s.responsivity * s.delta_gamma;
    if (omega_h) s.relative = s.delta_omega / *omega_h;
    return s;
}

Washboard washboard(double i_b, double gamma, double d_noise) {
    Washboard w{};
    w.potential = -std::cos(gamma) - i_b * gamma;
    if (std::abs(i_b) < 1.0) {
        const double c = std::sqrt(1.0 - i_b * i_b);
        const double a = std::abs(i_b);
        w.barrier = 2.0 * c - a * (kPi - 2.0 * std::asin(a));
        w.unstable_point = kPi - std::asin(i_b);
        if (d_noise > 0.0) w.kramers_rate = c / kTwoPi * std::exp(-*w.barrier / d_noise);
    }
    return w;
}

double mean_winding_rate(const RealSeries& gamma) {
    const auto& v = gamma.values();
    if (v.size() < 2) throw PreconditionError("mean_winding_rate: need at least two samples");
    const double dir = v.back() >= v.front() ? 1.0 : -1.0;
    const double start = v.front();
    double first_t = -1.0, last_t = -1.0;
    long first_k = 0, last_k = 0;
    long next_k = 1;
    for (std::size_t i = 1; i < v.size(); ++i) {
        const double level = start + dir * kTwoPi * static_cast<double>(next_k);
        // Crossings in the drift direction only; noise-free paths are monotone.
        if ((v[i] - level) * dir >= 0.0 && (v[i - 1] - level) * dir < 0.0) {
            const double frac = (level - v[i - 1]) / (v[i] - v[i - 1]);
            const double t = (static_cast<double>(i - 1) + frac) * gamma.dt();
            if (first_t < 0.0) { first_t = t; first_k = next_k; }
            last_t = t;
            last_k = next_k;
            ++next_k;
        }
    }
    if (first_t < 0.0 || last_k == first_k) return (v.back() - v.front()) / gamma.duration();
    return dir * kTwoPi * static_cast<double>(last_k - first_k) / (last_t - first_t);
}

SlipCount count_phase_slips(const RealSeries& gamma, double centre, double band) {
    if (!(band > 0.0) || band >= kPi) throw ParameterError("count_phase_slips: band must lie in (0, pi)");
    SlipCount out;
    long well = 0;
    const auto& v = gamma.values();
    // Start in the well nearest the first sample.
    well = std::lround((v.front() - centre) / kTwoPi);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double rel = v[i] - (centre + kTwoPi * static_cast<double>(well));
        if (rel > kTwoPi - band) {
            ++well;
            ++out.forward;
            out.times.push_back(gamma.time(i));
        } else if (rel < -(kTwoPi - band)) {
            --well;
            ++out.backward;
            out.times.push_back(gamma.time(i));
        }
    }
    return out;
}

}  // namespace seo
