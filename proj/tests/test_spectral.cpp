#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <random>
#include <sstream>

#include "seo/adler.hpp"
#include "seo/constants.hpp"
#include "seo/error.hpp"
#include "seo/spectral.hpp"

using namespace seo;

namespace {

RealSeries tone(double f, double fs, std::size_t n, double amp = 1.0, double phase = 0.3) {
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = amp * std::sin(kTwoPi * f * static_cast<double>(k) / fs + phase);
    return RealSeries(1.0 / fs, std::move(v));
}

double integral(const PsdEstimate& p) {
    double s = 0.0;
    for (double x : p.power) s += x;
    return s * p.bin_width();
}

const double kOmegaEff = kTwoPi * 236.4e3;
const double kOmegaA = kTwoPi * 49.6;

AdlerSource adler_source() {
    AdlerSource s;
    s.omega_eff = kOmegaEff;
    s.omega_a = kOmegaA;
    return s;
}

WelchConfig small_welch() {
    WelchConfig w;
    w.segment_len = 4096;
    w.segments = 8;
    return w;
}

}  // namespace

TEST_SUITE("spectral-analysis") {

TEST_CASE("unit sinusoid at a bin centre integrates to one half") {
    const double fs = 1000.0;
    const std::size_t seg = 1024;
    const double f0 = 100.0 * fs / seg;
    for (Window w : {Window::Hann, Window::Rectangular, Window::BlackmanHarris}) {
        const auto p = welch_psd(tone(f0, fs, 16 * seg), seg, 0.5, w);
        CAPTURE(window_name(w));
        CHECK(p.band_power(f0, 4) == doctest::Approx(0.5).epsilon(1e-3));
        CHECK(p.one_sided);
        CHECK(p.freqs.front() == 0.0);
        CHECK(p.freqs.back() == doctest::Approx(fs / 2.0));
        for (double x : p.power) CHECK(x >= 0.0);
    }
    CHECK(welch_psd(tone(f0, fs, 4 * seg), seg, 0.5).enbw == doctest::Approx(1.5).epsilon(1e-3));
}

TEST_CASE("white noise integrates to its variance") {
    std::mt19937_64 g(21);
    std::normal_distribution<double> n(0.0, 1.7);
    std::vector<double> v(512 * 130);
    for (auto& x : v) x = n(g);
    const auto p = welch_psd(RealSeries(0.01, v), 512, 0.5);
    CHECK(p.segments >= 64);
    CHECK(integral(p) == doctest::Approx(1.7 * 1.7).epsilon(0.05));
    // Flat: the two halves of the band agree.
    double lo = 0.0, hi = 0.0;
    const std::size_t m = p.power.size() / 2;
    for (std::size_t k = 1; k < m; ++k) lo += p.power[k];
    for (std::size_t k = m; k < p.power.size() - 1; ++k) hi += p.power[k];
    CHECK(lo / hi == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("Parseval against the windowed signal") {
    std::mt19937_64 g(4);
    std::normal_distribution<double> n;
    std::vector<double> v(256);
    for (auto& x : v) x = n(g) + 0.4;
    const auto w = window_samples(Window::Hann, 256);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        num += v[k] * v[k] * w[k] * w[k];
        den += w[k] * w[k];
    }
    const auto p = welch_psd(RealSeries(0.5, v), 256, 0.0);
    CHECK(integral(p) == doctest::Approx(num / den).epsilon(1e-3));

    std::vector<cplx> z(256);
    for (auto& x : z) x = {n(g), n(g)};
    double zn = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) zn += std::norm(z[k]) * w[k] * w[k];
    const auto pz = welch_psd(ComplexSeries(0.5, z), 256, 0.0);
    CHECK_FALSE(pz.one_sided);
    CHECK(integral(pz) == doctest::Approx(zn / den).epsilon(1e-3));
}

TEST_CASE("DC lands in bin zero with a rectangular window") {
    const auto p = welch_psd(RealSeries(1.0, std::vector<double>(4096, 2.0)), 1024, 0.5, Window::Rectangular);
    CHECK(p.power[0] * p.bin_width() == doctest::Approx(4.0).epsilon(1e-12));
    for (std::size_t k = 1; k < p.power.size(); ++k) CHECK(p.power[k] < 1e-20);
}

TEST_CASE("complex input gives a centred two-sided axis") {
    const double fs = 64.0;
    std::vector<cplx> z(8192);
    for (std::size_t k = 0; k < z.size(); ++k) z[k] = std::polar(1.0, -kTwoPi * 5.0 * static_cast<double>(k) / fs);
    const auto p = welch_psd(ComplexSeries(1.0 / fs, z), 1024, 0.5);
    CHECK(p.freqs.front() == doctest::Approx(-fs / 2.0));
    CHECK(p.band_power(-5.0, 4) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(p.band_power(5.0, 4) < 1e-12);
}

TEST_CASE("argument checks") {
    const auto t = tone(1.0, 10.0, 1000);
    CHECK_THROWS_AS((void)welch_psd(t, 2048, 0.5), PreconditionError);
    CHECK_THROWS_AS((void)welch_psd(t, 100, 0.5), PreconditionError);
    CHECK_THROWS_AS((void)welch_psd(t, 128, 0.95), PreconditionError);
    CHECK(window_from_name("hann") == Window::Hann);
    CHECK_THROWS_AS((void)window_from_name("kaiser"), ParameterError);
}

TEST_CASE("peak extraction") {
    const double fs = 1000.0;
    const std::size_t seg = 2048;
    const double bin = fs / seg;
    SUBCASE("single off-centre tone") {
        const double f0 = 123.3 * bin;
        const auto peaks = extract_sidebands(welch_psd(tone(f0, fs, 8 * seg), seg, 0.5), 10, 20.0);
        REQUIRE(peaks.size() == 1);
        CHECK(std::abs(peaks[0].freq - f0) < 0.1 * bin);
    }
    SUBCASE("two tones 20 dB apart") {
        auto a = tone(200.0 * bin, fs, 8 * seg, 1.0);
        const auto b = tone(210.0 * bin, fs, 8 * seg, 0.1);
        std::vector<double> v(a.values());
        for (std::size_t k = 0; k < v.size(); ++k) v[k] += b[k];
        const auto peaks = extract_sidebands(welch_psd(RealSeries(a.dt(), v), seg, 0.5), 10, 10.0);
        REQUIRE(peaks.size() == 2);
        CHECK(peaks[0].freq == doctest::Approx(200.0 * bin).epsilon(1e-3));
        CHECK(peaks[1].freq == doctest::Approx(210.0 * bin).epsilon(1e-3));
        CHECK(10.0 * std::log10(peaks[0].power / peaks[1].power) == doctest::Approx(20.0).epsilon(0.01));
    }
}

TEST_CASE("dB rows, clipping and single-line classification") {
    PsdEstimate a, b;
    a.freqs = b.freqs = {0.0, 1.0, 2.0, 3.0};
    a.power = {1.0, 100.0, 1e-9, 0.0};
    b.power = {10.0, 1.0, 1e-3, 1.0};
    double ref = 0.0;
    const auto rows = to_db_rows({a, b}, -60.0, &ref);
    CHECK(ref == 100.0);
    CHECK(rows[0][1] == doctest::Approx(0.0));
    CHECK(rows[0][0] == doctest::Approx(-20.0));
    CHECK(rows[0][2] == -60.0);
    CHECK(rows[0][3] == -60.0);
    CHECK(rows[1][0] == doctest::Approx(-10.0));
    CHECK(is_single_line(rows[0], -60.0, 1));
    CHECK_FALSE(is_single_line(rows[1], -60.0, 2));
    CHECK(is_single_line(rows[1], -60.0, 3));
}

TEST_CASE("Adler spectrogram: locked lines, comb spacing and weights") {
    const auto src = adler_source();
    const double i_ref = kOmegaA / kOmegaEff;
    const std::vector<double> det{-1.5 * i_ref, -0.5 * i_ref, 0.0, 0.5 * i_ref, 1.2 * i_ref, 1.5 * i_ref};
    const auto res = sweep_spectrogram(src, det, small_welch(), 11);
    const auto& sg = res.spectrogram;
    REQUIRE(sg.rows_db.size() == det.size());
    const double bin = res.rows[0].bin_width();

    for (std::size_t r : {1u, 2u, 3u}) {
        CAPTURE(r);
        CHECK(is_single_line(sg.rows_db[r], sg.db_floor, 10));
        // The locked line sits at the drive, i.e. at i_b omega_a / 2pi from Omega_eff.
        const auto peaks = extract_sidebands(res.rows[r], 1, 10.0);
        REQUIRE(peaks.size() == 1);
        CHECK(std::abs(peaks[0].freq - det[r] * kOmegaEff / kTwoPi) < bin);
    }

    // i_b = 1.2: comb spacing equals omega_s / 2 pi.
    const double ws = *sideband_spacing(kOmegaEff + 1.2 * kOmegaA, kOmegaEff, kOmegaA) / kTwoPi;
    auto peaks = extract_sidebands(res.rows[4], 6, 10.0);
    REQUIRE(peaks.size() >= 4);
    for (std::size_t k = 1; k < peaks.size(); ++k) {
        const double gap = peaks[k].freq - peaks[k - 1].freq;
        CHECK(gap == doctest::Approx(ws).epsilon(0.02));
        CHECK(std::abs(gap - ws) < bin);
    }

    // i_b = 1.5: line powers against |g_k|^2 weights.
    const double w15 = std::sqrt(1.25);
    const auto weights = comb_line_weights(1.5, 3);
    const auto& row = res.rows[5];
    const double total = integral(row);
    for (int k = 0; k <= 3; ++k) {
        const double f = (1.5 - k * w15) * kOmegaA / kTwoPi;
        const double db = 10.0 * std::log10(row.band_power(f, 3) / total / weights[k]);
        CAPTURE(k);
        CHECK(std::abs(db) < 1.0);
    }

    // Mirror symmetry: i_b -> -i_b reflects the comb about the drive offset.
    const auto pos = extract_sidebands(res.rows[5], 4, 10.0);
    const auto neg = extract_sidebands(res.rows[0], 4, 10.0);
    REQUIRE(pos.size() == neg.size());
    for (std::size_t k = 0; k < pos.size(); ++k) {
        const auto& m = neg[neg.size() - 1 - k];
        CHECK(std::abs(pos[k].freq + m.freq) < bin);
        CHECK(10.0 * std::log10(pos[k].power / m.power) == doctest::Approx(0.0).scale(1.0).epsilon(0.2));
    }
}

TEST_CASE("locked-band readout on a synthetic spectrogram") {
    Spectrogram sg;
    sg.detunings = {-3.0, -2.0, -1.0, 0.0, 1.0, 2.0};
    sg.freqs = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
    const std::vector<double> line{-60, -60, -60, -60, -60, 0, -60, -60, -60, -60, -60, -60};
    const std::vector<double> comb{-10, -60, -60, -60, -60, 0, -60, -60, -60, -60, -60, -20};
    sg.rows_db = {comb, line, line, line, line, comb};
    const auto band = locked_band(sg, 2);
    REQUIRE(band);
    CHECK(band->locked_rows == 4);
    CHECK(band->lower == doctest::Approx(-2.5));
    CHECK(band->upper == doctest::Approx(1.5));
    CHECK(band->half_width == doctest::Approx(2.0));
    sg.rows_db[3] = comb;
    CHECK_FALSE(locked_band(sg, 2).has_value());
}

TEST_CASE("spectrogram export formats") {
    const auto res = sweep_spectrogram(adler_source(), {0.0, 1e-4}, small_welch(), 3);
    std::ostringstream csv;
    write_spectrogram_csv(csv, res.spectrogram);
    std::istringstream in(csv.str());
    std::string line;
    std::size_t comments = 0, data = 0;
    std::string header;
    while (std::getline(in, line)) {
        if (line.rfind('#', 0) == 0) {
            ++comments;
        } else if (header.empty()) {
            header = line;
        } else {
            ++data;
        }
    }
    CHECK(comments > 0);
    CHECK(header.rfind("detuning,", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) == res.spectrogram.freqs.size());
    CHECK(data == 2);

    std::ostringstream js;
    write_spectrogram_sidecar(js, res.spectrogram);
    const auto j = nlohmann::json::parse(js.str());
    CHECK(j.at("window") == "hann");
    CHECK(j.at("segment_len") == 4096);
    CHECK(j.at("seed") == 3);
    CHECK(j.at("db_floor") == -60.0);
}

TEST_CASE("sweeps are deterministic and annotate failures with the grid index") {
    auto src = adler_source();
    src.d_noise = 1e-3;
    const std::vector<double> det{-1e-4, 0.0, 3e-4};
    const auto a = sweep_spectrogram(src, det, small_welch(), 9, ExecPolicy::Serial);
    const auto b = sweep_spectrogram(src, det, small_welch(), 9, ExecPolicy::Parallel);
    CHECK(a.spectrogram.rows_db == b.spectrogram.rows_db);
    const auto c = sweep_spectrogram(src, det, small_welch(), 10, ExecPolicy::Serial);
    CHECK(a.spectrogram.rows_db != c.spectrogram.rows_db);

    // |i_b| = 200 trips the Adler step guard at the last grid point only.
    const std::vector<double> bad{0.0, 200.0 * kOmegaA / kOmegaEff};
    try {
        (void)sweep_spectrogram(src, bad, small_welch(), 9);
        FAIL("expected an error");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("grid index 1") != std::string::npos);
    }
    CHECK_THROWS_AS((void)sweep_spectrogram(src, {1e-4, 0.0}, small_welch(), 9), PreconditionError);
}

}  // TEST_SUITE
