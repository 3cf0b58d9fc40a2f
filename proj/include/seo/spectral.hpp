#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "seo/cavity.hpp"
#include "seo/full_dynamics.hpp"
#include "seo/parallel.hpp"
#include "seo/time_series.hpp"

namespace seo {

enum class Window { Hann, Rectangular, BlackmanHarris };

[[nodiscard]] std::string window_name(Window w);
[[nodiscard]] Window window_from_name(const std::string& name);
[[nodiscard]] std::vector<double> window_samples(Window w, std::size_t n);

struct PsdEstimate {
    std::vector<double> freqs;   // strictly increasing, cycles per time unit of the input
    std::vector<double> power;   // density per frequency unit
    std::string window;
    std::size_t segments = 0;
    double enbw = 0.0;           // equivalent noise bandwidth in bins
    bool one_sided = true;

    [[nodiscard]] double bin_width() const { return freqs.size() > 1 ? freqs[1] - freqs[0] : 0.0; }
    // Power summed over bins within half_bins of the bin nearest f.
    [[nodiscard]] double band_power(double f, std::size_t half_bins) const;
    // New axis f' = scale * f + offset with density rescaled to keep band powers.
    [[nodiscard]] PsdEstimate rescaled(double scale, double offset) const;
};

// Averaged modified periodogram. Real input gives a one-sided estimate where
// a unit sinusoid at a bin centre integrates to 0.5; complex input gives a
// two-sided estimate on an axis centred at zero.
[[nodiscard]] PsdEstimate welch_psd(const RealSeries& ts, std::size_t segment_len, double overlap,
                                    Window window = Window::Hann);
[[nodiscard]] PsdEstimate welch_psd(const ComplexSeries& ts, std::size_t segment_len, double overlap,
                                    Window window = Window::Hann);

struct Peak {
    double freq;
    double power;            // parabolically refined, linear units
    double prominence_db;
    std::size_t bin;
};

// Local maxima with topographic prominence >= min_prominence_db; the
// strongest max_peaks are kept and returned sorted by frequency.
[[nodiscard]] std::vector<Peak> extract_sidebands(const PsdEstimate& psd, std::size_t max_peaks,
                                                  double min_prominence_db);

struct WelchConfig {
    std::size_t segment_len = 8192;
    double overlap = 0.5;
    Window window = Window::Hann;
    std::size_t segments = 16;
    double db_floor = -60.0;

    // Samples needed for `segments` overlapping segments.
    [[nodiscard]] std::size_t samples_needed() const;
};

// Noiseless or noisy Adler phase; observable is the analytic signal of
// cos A_theta demodulated at Omega_eff, exp(i (i_b tau - gamma)).
// Frequency axis: Hz offset from Omega_eff / 2 pi.
struct AdlerSource {
    double omega_eff = 0.0;      // rad/s
    double omega_a = 0.0;        // rad/s
    double d_noise = 0.0;
    double d_tau = 0.01;
    std::size_t decimation = 10;
    double transient_tau = 200.0;
    double gamma_init = 0.0;
};

// Envelope model driven at omega_d = Omega_H (1 + detuning); observable is
// the lab-frame conjugate amplitude demodulated at Omega_H. Hz offset axis.
struct EnvelopeSource {
    EnvelopeCoefficients coeffs;
    double xi0 = 0.0;
    double dt = 0.0;
    std::size_t decimation = 1;
    double transient = 0.0;
    cplx a0{0.0, 0.0};
};

// Full model driven at omega_d = omega_ref (1 + detuning); observable x - <x>,
// one-sided, absolute Hz axis.
struct FullSource {
    CavityParams cav;
    ThermoMechParams tm;
    double p0 = 0.0;
    double eps = 0.0;
    double omega_ref = 0.0;
    double dt = 0.0;
    std::size_t decimation = 1;
    double transient = 0.0;
    bool noise_on = false;
    FullState init{};
};

using SpectrogramSource = std::variant<AdlerSource, EnvelopeSource, FullSource>;

struct Spectrogram {
    std::vector<double> detunings;   // (omega_d - Omega_eff) / Omega_eff
    std::vector<double> freqs;       // Hz
    std::vector<std::vector<double>> rows_db;   // dB re global maximum, clipped
    double db_floor = -60.0;
    double ref_power = 0.0;          // linear power density of 0 dB
    std::string source;
    std::string freq_axis;           // description of the frequency axis
    WelchConfig welch;
    std::uint64_t seed = 0;
};

// Raw per-row PSDs plus the assembled dB matrix.
struct SpectrogramResult {
    Spectrogram spectrogram;
    std::vector<PsdEstimate> rows;
};

[[nodiscard]] SpectrogramResult sweep_spectrogram(const SpectrogramSource& source, const std::vector<double>& detunings,
                                                  const WelchConfig& welch, std::uint64_t seed,
                                                  ExecPolicy policy = ExecPolicy::Parallel);

// Assembles dB rows re the global maximum, clipped at db_floor.
[[nodiscard]] std::vector<std::vector<double>> to_db_rows(const std::vector<PsdEstimate>& rows, double db_floor,
                                                          double* ref_power = nullptr);

// A row is a single clipped line when every bin above the floor lies within
// max_spread bins of the row maximum.
[[nodiscard]] bool is_single_line(const std::vector<double>& row_db, double db_floor, std::size_t max_spread);

struct LockedBand {
    double lower;       // midpoints between the outermost single-line rows and their neighbours
    double upper;
    double half_width;
    std::size_t locked_rows;
};

// Contiguous single-line run containing the row nearest zero detuning.
[[nodiscard]] std::optional<LockedBand> locked_band(const Spectrogram& sg, std::size_t max_spread);

// CSV matrix: '#' comment lines, then "detuning,<f0>,<f1>,..." and one row per
// detuning "<d>,<dB>,...".
void write_spectrogram_csv(std::ostream& os, const Spectrogram& sg);
// JSON sidecar with window, segment length, overlap, segments, seed, floor.
void write_spectrogram_sidecar(std::ostream& os, const Spectrogram& sg);

}  // namespace seo
