#include "seo/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "fft.hpp"
#include "seo/adler.hpp"
#include "seo/constants.hpp"
#include "seo/envelope.hpp"
#include "seo/error.hpp"
#include "seo/rng.hpp"

namespace seo {

std::string window_name(Window w) {
    switch (w) {
        case Window::Hann: return "hann";
        case Window::Rectangular: return "rectangular";
        case Window::BlackmanHarris: return "blackman-harris";
    }
    return "unknown";
}

Window window_from_name(const std::string& name) {
    if (name == "hann") return Window::Hann;
    if (name == "rectangular") return Window::Rectangular;
    if (name == "blackman-harris") return Window::BlackmanHarris;
    throw ParameterError("unknown window '" + name + "' (hann, rectangular, blackman-harris)");
}

std::vector<double> window_samples(Window w, std::size_t n) {
    std::vector<double> out(n, 1.0);
    const double step = kTwoPi / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double a = step * static_cast<double>(k);   // periodic form
        switch (w) {
            case Window::Hann: out[k] = 0.5 - 0.5 * std::cos(a); break;
            case Window::Rectangular: break;
            case Window::BlackmanHarris:
                out[k] = 0.35875 - 0.48829 * std::cos(a) + 0.14128 * std::cos(2.0 * a) - 0.01168 * std::cos(3.0 * a);
                break;
        }
    }
    return out;
}

double PsdEstimate::band_power(double f, std::size_t half_bins) const {
    if (freqs.empty()) return 0.0;
    const auto it = std::lower_bound(freqs.begin(), freqs.end(), f);
    std::size_t c = static_cast<std::size_t>(it - freqs.begin());
    if (c == freqs.size() || (c > 0 && f - freqs[c - 1] < freqs[c] - f)) c = c == 0 ? 0 : c - 1;
    const std::size_t lo = c >= half_bins ? c - half_bins : 0;
    const std::size_t hi = std::min(freqs.size() - 1, c + half_bins);
    double s = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) s += power[k];
    return s * bin_width();
}

PsdEstimate PsdEstimate::rescaled(double scale, double offset) const {
    if (!(scale > 0.0)) throw ParameterError("PsdEstimate::rescaled: scale must be positive");
    PsdEstimate out = *this;
    for (double& f : out.freqs) f = scale * f + offset;
    for (double& p : out.power) p /= scale;
    return out;
}

std::size_t WelchConfig::samples_needed() const {
    const auto hop = segment_len - static_cast<std::size_t>(std::floor(overlap * static_cast<double>(segment_len)));
    return segment_len + (segments > 0 ? segments - 1 : 0) * hop;
}

namespace {

template <typename T>
PsdEstimate welch_impl(const TimeSeries<T>& ts, std::size_t seg, double overlap, Window window, bool complex_in) {
    if (seg < 2 || (seg & (seg - 1)) != 0) throw PreconditionError("welch_psd: segment length must be a power of two");
    if (!(overlap >= 0.0 && overlap <= 0.9)) throw PreconditionError("welch_psd: overlap must lie in [0, 0.9]");
    if (seg > ts.size()) throw PreconditionError("welch_psd: series shorter than one segment");

    const auto hop = seg - static_cast<std::size_t>(std::floor(overlap * static_cast<double>(seg)));
    const std::size_t nseg = (ts.size() - seg) / hop + 1;
    const auto w = window_samples(window, seg);
    double s1 = 0.0, s2 = 0.0;
    for (double v : w) { s1 += v; s2 += v * v; }

    std::vector<double> acc(seg, 0.0);
    std::vector<cplx> buf(seg);
    const auto& x = ts.values();
    for (std::size_t s = 0; s < nseg; ++s) {
        const std::size_t off = s * hop;
        for (std::size_t k = 0; k < seg; ++k) buf[k] = w[k] * cplx(x[off + k]);
        detail::fft_forward(buf);
        for (std::size_t k = 0; k < seg; ++k) acc[k] += std::norm(buf[k]);
    }

    const double fs = 1.0 / ts.dt();
    const double norm = 1.0 / (static_cast<double>(nseg) * fs * s2);
    PsdEstimate out;
    out.window = window_name(window);
    out.segments = nseg;
    out.enbw = static_cast<double>(seg) * s2 / (s1 * s1);
    out.one_sided = !complex_in;
    const double df = fs / static_cast<double>(seg);
    if (complex_in) {
        out.freqs.resize(seg);
        out.power.resize(seg);
        for (std::size_t k = 0; k < seg; ++k) {
            out.freqs[k] = (static_cast<double>(k) - static_cast<double>(seg / 2)) * df;
            out.power[k] = acc[(k + seg / 2) % seg] * norm;
        }
    } else {
        const std::size_t half = seg / 2;
        out.freqs.resize(half + 1);
        out.power.resize(half + 1);
        for (std::size_t k = 0; k <= half; ++k) {
            out.freqs[k] = static_cast<double>(k) * df;
            out.power[k] = acc[k] * norm * ((k == 0 || k == half) ? 1.0 : 2.0);
        }
    }
    return out;
}

}  // namespace

PsdEstimate welch_psd(const RealSeries& ts, std::size_t segment_len, double overlap, Window window) {
    return welch_impl(ts, segment_len, overlap, window, false);
}

PsdEstimate welch_psd(const ComplexSeries& ts, std::size_t segment_len, double overlap, Window window) {
    return welch_impl(ts, segment_len, overlap, window, true);
}

std::vector<Peak> extract_sidebands(const PsdEstimate& psd, std::size_t max_peaks, double min_prominence_db) {
    const std::size_t n = psd.power.size();
    std::vector<Peak> peaks;
    if (n < 3 || max_peaks == 0) return peaks;
    // Bins more than 150 dB under the maximum are rounding residue; flatten
    // them so their jitter cannot pass as prominent peaks.
    const double top = *std::max_element(psd.power.begin(), psd.power.end());
    const double floor = top > 0.0 ? top * 1e-15 : std::numeric_limits<double>::min();
    std::vector<double> db(n);
    for (std::size_t k = 0; k < n; ++k) db[k] = 10.0 * std::log10(std::max(psd.power[k], floor));

    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (!(db[k] > db[k - 1] && db[k] >= db[k + 1])) continue;
        // Prominence: descend on each side until higher ground or the edge;
        // the higher of the two minima is the reference level.
        double left_min = db[k];
        for (std::size_t j = k; j > 0 && db[j - 1] <= db[k]; --j) left_min = std::min(left_min, db[j - 1]);
        double right_min = db[k];
        for (std::size_t j = k; j + 1 < n && db[j + 1] <= db[k]; ++j) right_min = std::min(right_min, db[j + 1]);
        const double base = std::max(left_min, right_min);
        const double prom = db[k] - base;
        if (prom < min_prominence_db) continue;

        const double a = db[k - 1], b = db[k], c = db[k + 1];
        const double den = a - 2.0 * b + c;
        const double delta = den != 0.0 ? 0.5 * (a - c) / den : 0.0;
        const double peak_db = b - 0.25 * (a - c) * delta;
        peaks.push_back({psd.freqs[k] + delta * psd.bin_width(), std::pow(10.0, peak_db / 10.0), prom, k});
    }
    std::sort(peaks.begin(), peaks.end(), [](const Peak& l, const Peak& r) { return l.power > r.power; });
    if (peaks.size() > max_peaks) peaks.resize(max_peaks);
    std::sort(peaks.begin(), peaks.end(), [](const Peak& l, const Peak& r) { return l.freq < r.freq; });
    return peaks;
}

namespace {

PsdEstimate adler_row(const AdlerSource& src, double detuning, const WelchConfig& welch, std::uint64_t seed) {
    AdlerParams p;
    p.omega_a = src.omega_a;
    p.i_b = detuning * src.omega_eff / src.omega_a;
    p.d_noise = src.d_noise;
    p.omega_d = src.omega_eff * (1.0 + detuning);
    const std::size_t keep = welch.samples_needed() * src.decimation;
    const auto skip = static_cast<std::size_t>(std::llround(src.transient_tau / src.d_tau));
    const auto gamma = integrate_adler(p, src.gamma_init, static_cast<double>(skip + keep) * src.d_tau, src.d_tau, seed);
    const auto& g = gamma.values();
    const std::size_t start = g.size() - keep;
    std::vector<cplx> z(keep);
    for (std::size_t k = 0; k < keep; ++k) {
        const double tau = gamma.time(start + k);
        z[k] = std::polar(1.0, p.i_b * tau - g[start + k]);
    }
    const auto decimated = block_average(ComplexSeries(src.d_tau, std::move(z), seed), src.decimation);
    // cycles per unit tau -> Hz
    return welch_psd(decimated, welch.segment_len, welch.overlap, welch.window).rescaled(src.omega_a, 0.0);
}

PsdEstimate envelope_row(const EnvelopeSource& src, double detuning, const WelchConfig& welch, std::uint64_t seed) {
    const auto& c = src.coeffs;
    const double omega_d = c.omega_h * (1.0 + detuning);
    const std::size_t keep = welch.samples_needed() * src.decimation;
    const auto skip = static_cast<std::size_t>(std::llround(src.transient / src.dt));
    EnvelopeRunOptions opts;
    opts.a0 = src.a0 != cplx{} ? src.a0 : cplx(c.r0.value_or(0.0), 0.0);
    const auto a = integrate_envelope(c, EnvelopeDrive{omega_d, src.xi0}, static_cast<double>(skip + keep) * src.dt,
                                      src.dt, seed, opts);
    const auto& v = a.values();
    const std::size_t start = v.size() - keep;
    const double shift = c.omega_big0 - c.omega_h;
    std::vector<cplx> s(keep);
    for (std::size_t k = 0; k < keep; ++k) s[k] = std::conj(v[start + k]) * std::polar(1.0, shift * a.time(start + k));
    const auto decimated = block_average(ComplexSeries(src.dt, std::move(s), seed), src.decimation);
    return welch_psd(decimated, welch.segment_len, welch.overlap, welch.window);
}

PsdEstimate full_row(const FullSource& src, double detuning, const WelchConfig& welch, std::uint64_t seed) {
    DriveProgram d{src.p0, src.eps, src.omega_ref * (1.0 + detuning)};
    const std::size_t keep = welch.samples_needed() * src.decimation;
    const auto skip = static_cast<std::size_t>(std::llround(src.transient / src.dt));
    FullRunOptions opts;
    opts.record_start = static_cast<double>(skip) * src.dt;
    const auto traj = integrate_full(src.cav, src.tm, d, src.init, static_cast<double>(skip + keep) * src.dt, src.dt,
                                     seed, src.noise_on, opts);
    const auto& v = traj.values();
    const std::size_t start = v.size() - keep;
    double m = 0.0;
    for (std::size_t k = start; k < v.size(); ++k) m += v[k].x;
    m /= static_cast<double>(keep);
    std::vector<double> x(keep);
    for (std::size_t k = 0; k < keep; ++k) x[k] = v[start + k].x - m;
    const auto decimated = block_average(RealSeries(src.dt, std::move(x), seed), src.decimation);
    return welch_psd(decimated, welch.segment_len, welch.overlap, welch.window);
}

}  // namespace

std::vector<std::vector<double>> to_db_rows(const std::vector<PsdEstimate>& rows, double db_floor, double* ref_power) {
    double ref = 0.0;
    for (const auto& r : rows)
        for (double p : r.power) ref = std::max(ref, p);
    if (ref_power) *ref_power = ref;
    std::vector<std::vector<double>> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out[i].resize(rows[i].power.size());
        for (std::size_t k = 0; k < rows[i].power.size(); ++k) {
            const double p = rows[i].power[k];
            const double db = (p > 0.0 && ref > 0.0) ? 10.0 * std::log10(p / ref) : db_floor;
            out[i][k] = std::max(db, db_floor);
        }
    }
    return out;
}

SpectrogramResult sweep_spectrogram(const SpectrogramSource& source, const std::vector<double>& detunings,
                                    const WelchConfig& welch, std::uint64_t seed, ExecPolicy policy) {
    if (detunings.empty()) throw PreconditionError("sweep_spectrogram: empty detuning grid");
    if (!std::is_sorted(detunings.begin(), detunings.end()))
        throw PreconditionError("sweep_spectrogram: detuning grid must be sorted");

    auto rows = map_indexed(policy, detunings.size(), [&](std::size_t i) {
        const std::uint64_t s = derive_seed(seed, i);
        try {
            return std::visit(
                [&](const auto& src) -> PsdEstimate {
                    using S = std::decay_t<decltype(src)>;
                    if constexpr (std::is_same_v<S, AdlerSource>) return adler_row(src, detunings[i], welch, s);
                    else if constexpr (std::is_same_v<S, EnvelopeSource>) return envelope_row(src, detunings[i], welch, s);
                    else return full_row(src, detunings[i], welch, s);
                },
                source);
        } catch (const Error& e) {
            rethrow_with_prefix(e, "sweep_spectrogram: grid index " + std::to_string(i) + ": ");
        }
    });

    SpectrogramResult out;
    auto& sg = out.spectrogram;
    sg.detunings = detunings;
    sg.freqs = rows.front().freqs;
    sg.db_floor = welch.db_floor;
    sg.welch = welch;
    sg.seed = seed;
    sg.rows_db = to_db_rows(rows, welch.db_floor, &sg.ref_power);
    switch (source.index()) {
        case 0: sg.source = "adler"; sg.freq_axis = "Hz offset from Omega_eff/2pi"; break;
        case 1: sg.source = "envelope"; sg.freq_axis = "Hz offset from Omega_H/2pi"; break;
        default: sg.source = "full"; sg.freq_axis = "Hz"; break;
    }
    out.rows = std::move(rows);
    return out;
}

bool is_single_line(const std::vector<double>& row_db, double db_floor, std::size_t max_spread) {
    if (row_db.empty()) return false;
    const auto peak = static_cast<std::size_t>(std::max_element(row_db.begin(), row_db.end()) - row_db.begin());
    for (std::size_t k = 0; k < row_db.size(); ++k) {
        const std::size_t dist = k > peak ? k - peak : peak - k;
        if (row_db[k] > db_floor && dist > max_spread) return false;
    }
    return true;
}

std::optional<LockedBand> locked_band(const Spectrogram& sg, std::size_t max_spread) {
    const auto& d = sg.detunings;
    if (d.empty()) return std::nullopt;
    std::size_t centre = 0;
    for (std::size_t i = 1; i < d.size(); ++i)
        if (std::abs(d[i]) < std::abs(d[centre])) centre = i;
    auto single = [&](std::size_t i) { return is_single_line(sg.rows_db[i], sg.db_floor, max_spread); };
    if (!single(centre)) return std::nullopt;
    std::size_t lo = centre, hi = centre;
    while (lo > 0 && single(lo - 1)) --lo;
    while (hi + 1 < d.size() && single(hi + 1)) ++hi;
    LockedBand b{};
    b.lower = lo > 0 ? 0.5 * (d[lo] + d[lo - 1]) : d[lo];
    b.upper = hi + 1 < d.size() ? 0.5 * (d[hi] + d[hi + 1]) : d[hi];
    b.half_width = 0.5 * (b.upper - b.lower);
    b.locked_rows = hi - lo + 1;
    return b;
}

void write_spectrogram_csv(std::ostream& os, const Spectrogram& sg) {
    os << "# spectrogram source=" << sg.source << " db_floor=" << format_double(sg.db_floor)
       << " ref_power=" << format_double(sg.ref_power) << '\n';
    os << "# first row: frequency axis (" << sg.freq_axis << "); first column: (omega_d-Omega_eff)/Omega_eff; cells: dB\n";
    os << "detuning";
    for (double f : sg.freqs) os << ',' << format_double(f);
    os << '\n';
    for (std::size_t i = 0; i < sg.detunings.size(); ++i) {
        os << format_double(sg.detunings[i]);
        for (double v : sg.rows_db[i]) os << ',' << format_double(v);
        os << '\n';
    }
}

void write_spectrogram_sidecar(std::ostream& os, const Spectrogram& sg) {
    nlohmann::ordered_json j;
    j["source"] = sg.source;
    j["window"] = window_name(sg.welch.window);
    j["segment_len"] = sg.welch.segment_len;
    j["overlap"] = sg.welch.overlap;
    j["segments"] = sg.welch.segments;
    j["seed"] = sg.seed;
    j["db_floor"] = sg.db_floor;
    j["ref_power"] = sg.ref_power;
    j["frequency_axis"] = sg.freq_axis;
    j["rows"] = sg.detunings.size();
    j["bins"] = sg.freqs.size();
    os << j.dump(2) << '\n';
}

}  // namespace seo
