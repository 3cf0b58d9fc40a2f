#include "app/runner.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>

#include <openssl/evp.h>

#include "seo/adler.hpp"
#include "seo/circle_map.hpp"
#include "seo/constants.hpp"
#include "seo/envelope.hpp"
#include "seo/full_dynamics.hpp"
#include "seo/parallel.hpp"
#include "seo/rng.hpp"
#include "seo/spectral.hpp"
#include "seo/stats.hpp"

namespace seo::app {

namespace fs = std::filesystem;

namespace {

using Cell = std::optional<double>;
using Row = std::vector<Cell>;

CavityParams cavity_from(const RunConfig& c) {
    CavityParams p;
    p.t_b = c.real("cavity.t_b", p.t_b);
    p.t_a = c.real("cavity.t_a", p.t_a);
    p.t_r = c.real("cavity.t_r", p.t_r);
    p.finesse = c.real("cavity.finesse", p.finesse);
    p.lambda = c.real("cavity.lambda", p.lambda);
    p.x_r = c.real("cavity.x_r", p.x_r);
    p.lambda0 = c.real("cavity.lambda0", p.lambda0);
    p.n_eff = c.real("cavity.n_eff", p.n_eff);
    p.length = c.real("cavity.length", p.length);
    p.validate();
    return p;
}

ThermoMechParams thermo_from(const RunConfig& c) {
    ThermoMechParams t;
    t.m = c.real("thermo.m", t.m);
    t.omega0 = c.real("thermo.omega0", t.omega0);
    t.gamma0 = c.real("thermo.gamma0", t.gamma0);
    t.gamma2 = c.real("thermo.gamma2", t.gamma2);
    t.beta = c.real("thermo.beta", t.beta);
    t.theta = c.real("thermo.theta", t.theta);
    t.eta = c.real("thermo.eta", t.eta);
    t.kappa = c.real("thermo.kappa", t.kappa);
    t.t_eff = c.real("thermo.t_eff", t.t_eff);
    t.validate();
    return t;
}

DriveProgram drive_from(const RunConfig& c) {
    DriveProgram d{c.real("drive.p0", 0.0), c.real("drive.eps", 0.0), c.real("drive.omega_d", 0.0)};
    d.validate();
    return d;
}

EnvelopeCoefficients coefficients_from(const RunConfig& c) {
    if (c.text("envelope.coefficients", "rates") == "device") {
        const auto cav = cavity_from(c);
        const auto tm = thermo_from(c);
        return envelope_coefficients(cav, tm, c.real("drive.p0"), c.real("drive.p1", 0.0));
    }
    return EnvelopeCoefficients::from_rates(c.real("envelope.gamma_big0"), c.real("envelope.gamma_big2"),
                                            c.real("envelope.omega_big0", 0.0), c.real("envelope.omega_big2", 0.0),
                                            c.real("envelope.theta_noise", 0.0));
}

AdlerParams adler_from(const RunConfig& c) {
    AdlerParams p;
    p.i_b = c.real("adler.i_b");
    p.d_noise = c.real("adler.d_noise", 0.0);
    p.omega_a = c.real("adler.omega_a", 1.0);
    p.validate();
    return p;
}

MapSpec map_from(const RunConfig& c) {
    MapSpec s;
    s.alpha = c.real("map.alpha");
    s.w_a = c.real("map.w_a", 0.0);
    if (c.text("map.function", "sine") == "quadratic_cap")
        s.fn = MapFunction::quadratic_cap(c.real("map.alpha_c"), c.real("map.theta_c", 0.0), c.real("map.z", 1.0));
    return s;
}

FullState full_init(const RunConfig& c, const CavityParams& cav, const ThermoMechParams& tm, double p0) {
    FullState s = static_equilibrium(cav, tm, p0);
    s.x += c.real("full.x_offset", 1e-3 * cav.lambda);
    return s;
}

Artifact write_artifact(const fs::path& dir, const std::string& name, const std::function<void(std::ostream&)>& fill) {
    const fs::path path = dir / name;
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
        out.imbue(std::locale::classic());
        fill(out);
        if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
    }
    return {name, sha256_file(path), fs::file_size(path)};
}

void write_rows(std::ostream& os, const std::string& comment, const std::vector<std::string>& cols,
                const std::vector<Row>& rows) {
    os << "# " << comment << '\n';
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) os << ',';
            if (r[i]) os << format_double(*r[i]);
        }
        os << '\n';
    }
}

struct Plan {
    std::vector<double> values;   // sweep values, or one placeholder
    std::string axis;             // column name of the first field
    bool sweeping = false;

    [[nodiscard]] RunConfig point(const RunConfig& cfg, std::size_t i) const {
        return sweeping ? cfg.with(axis, values[i]) : cfg;
    }
    [[nodiscard]] bool single() const { return values.size() == 1; }
};

Plan plan_for(const RunConfig& cfg) {
    if (const auto& s = cfg.sweep()) return {s->values(), s->axis, true};
    return {{0.0}, "point", false};
}

std::string summary_comment(const RunConfig& cfg, const std::string& what) {
    return "seo-sync " + scenario_name(cfg.scenario()) + " " + what + " seed=" + std::to_string(cfg.seed());
}

// ---- scenarios -------------------------------------------------------------

RunResult run_envelope(const RunConfig& cfg, const fs::path& dir) {
    const auto plan = plan_for(cfg);
    RunResult out;
    auto point = [&](std::size_t i, std::ostream* traj) -> Row {
        const auto c = plan.point(cfg, i);
        const auto coeffs = coefficients_from(c);
        std::optional<EnvelopeDrive> drive;
        if (c.real("envelope.xi0", 0.0) != 0.0) drive = EnvelopeDrive{c.real("envelope.omega_d"), c.real("envelope.xi0")};
        EnvelopeRunOptions o;
        o.a0 = {c.real("envelope.a0_re", coeffs.r0.value_or(0.0)), c.real("envelope.a0_im", 0.0)};
        o.stride = c.count("envelope.stride", 1);
        const double duration = c.real("envelope.duration");
        const auto a = integrate_envelope(coeffs, drive, duration, c.real("envelope.dt"), derive_seed(cfg.seed(), i), o);
        if (traj) write_csv(*traj, a);

        const auto late = a.tail(a.size() / 2);
        std::vector<double> amp;
        for (const auto& v : late.values()) amp.push_back(std::abs(v));
        Row row{plan.values[i], coeffs.gamma_big0, coeffs.omega_h, coeffs.r0, stats::mean(amp), amp.back()};
        Cell omega, sigma;
        if (*std::min_element(amp.begin(), amp.end()) > 0.0) {
            const double t_a = c.real("envelope.t_a", late.duration() / 10.0);
            const auto est = frequency_estimator(to_polar(late).phase, t_a);
            omega = est.omega;
            sigma = est.sigma;
        }
        row.push_back(omega);
        row.push_back(sigma);
        return row;
    };
    std::vector<Row> rows;
    if (plan.single()) {
        std::ostringstream traj;
        rows.push_back(point(0, &traj));
        out.artifacts.push_back(write_artifact(dir, "envelope.csv", [&](std::ostream& os) { os << traj.str(); }));
    } else {
        rows = map_indexed(ExecPolicy::Parallel, plan.values.size(), [&](std::size_t i) { return point(i, nullptr); });
    }
    out.artifacts.push_back(write_artifact(dir, "envelope_summary.csv", [&](std::ostream& os) {
        write_rows(os, summary_comment(cfg, "summary over the second half of each run"),
                   {plan.axis, "gamma_big0", "omega_h", "r0", "mean_amplitude", "final_amplitude", "omega_est", "sigma_est"},
                   rows);
    }));
    out.points = rows.size();
    return out;
}

RunResult run_adler(const RunConfig& cfg, const fs::path& dir) {
    const auto plan = plan_for(cfg);
    RunResult out;
    auto point = [&](std::size_t i, std::ostream* traj) -> Row {
        const auto c = plan.point(cfg, i);
        const auto p = adler_from(c);
        AdlerRunOptions o;
        o.stride = c.count("adler.stride", 1);
        const auto sp = stationary_phase(p.i_b);
        const double g0 = c.real("adler.gamma_init", sp ? sp->gamma : 0.0);
        const auto g = integrate_adler(p, g0, c.real("adler.duration_tau"), c.real("adler.d_tau"),
                                       derive_seed(cfg.seed(), i), o);
        if (traj) write_csv(*traj, g);
        const double expect = std::abs(p.i_b) > 1.0 ? std::copysign(std::sqrt(p.i_b * p.i_b - 1.0), p.i_b) : 0.0;
        Row row{plan.values[i], p.i_b, mean_winding_rate(g), expect, Cell{}, Cell{}};
        if (sp) {
            const auto slips = count_phase_slips(g, sp->gamma);
            row[4] = static_cast<double>(slips.forward);
            row[5] = static_cast<double>(slips.backward);
        }
        return row;
    };
    std::vector<Row> rows;
    if (plan.single()) {
        std::ostringstream traj;
        rows.push_back(point(0, &traj));
        out.artifacts.push_back(write_artifact(dir, "adler.csv", [&](std::ostream& os) { os << traj.str(); }));
    } else {
        rows = map_indexed(ExecPolicy::Parallel, plan.values.size(), [&](std::size_t i) { return point(i, nullptr); });
    }
    out.artifacts.push_back(write_artifact(dir, "adler_summary.csv", [&](std::ostream& os) {
        write_rows(os, summary_comment(cfg, "rates per unit tau"),
                   {plan.axis, "i_b", "mean_rate", "expected_rate", "slips_forward", "slips_backward"}, rows);
    }));
    out.points = rows.size();
    return out;
}

RunResult run_circle_map(const RunConfig& cfg, const fs::path& dir) {
    const auto plan = plan_for(cfg);
    RunResult out;
    auto point = [&](std::size_t i) {
        const auto c = plan.point(cfg, i);
        const auto spec = map_from(c);
        const auto w = winding_number(spec, c.real("map.theta0", 0.0), c.count("map.n_transient", 1000),
                                      c.count("map.n_measure", 0));
        StaircasePoint sp{spec.alpha, spec.w_a, w.w, 0, 0};
        if (w.locked) {
            sp.locked_p = w.locked->p;
            sp.locked_q = w.locked->q;
        }
        return sp;
    };
    const auto rows = map_indexed(ExecPolicy::Parallel, plan.values.size(), point);
    out.artifacts.push_back(write_artifact(dir, "staircase.csv", [&](std::ostream& os) {
        os << "# " << summary_comment(cfg, "winding per iteration") << '\n';
        write_staircase_csv(os, rows);
    }));
    if (plan.single()) {
        const auto spec = map_from(cfg);
        auto orbit = iterate(spec, cfg.real("map.theta0", 0.0), cfg.count("map.n_measure", 0));
        out.artifacts.push_back(write_artifact(dir, "orbit.csv", [&](std::ostream& os) {
            write_csv(os, RealSeries(1.0, std::move(orbit), cfg.seed()));
        }));
    }
    out.points = rows.size();
    return out;
}

RunResult run_full(const RunConfig& cfg, const fs::path& dir) {
    const auto plan = plan_for(cfg);
    RunResult out;
    struct PointOut {
        Row row;
        std::optional<LockReport> lock;
    };
    auto point = [&](std::size_t i, std::ostream* traj) -> PointOut {
        const auto c = plan.point(cfg, i);
        const auto cav = cavity_from(c);
        const auto tm = thermo_from(c);
        const auto drive = drive_from(c);
        FullRunOptions o;
        o.stride = c.count("full.stride", 1);
        o.record_start = c.real("full.record_start", 0.0);
        const std::uint64_t seed = derive_seed(cfg.seed(), i);
        const auto s = integrate_full(cav, tm, drive, full_init(c, cav, tm, drive.p0), c.real("full.duration"),
                                      c.real("full.dt"), seed, c.flag("full.noise", false), o);
        if (traj) write_csv(*traj, s);
        const double tf = c.real("full.transient_fraction", 0.25);
        const auto sum = oscillation_summary(s, tf);
        PointOut po{{plan.values[i], sum.amplitude, sum.frequency, sum.mean_x}, std::nullopt};
        if (drive.eps != 0.0) {
            LockOptions lo;
            lo.transient_fraction = tf;
            auto rep = detect_lock(s, drive.omega_d, static_cast<long>(c.count("full.lock_p", 1)),
                                   static_cast<long>(c.count("full.lock_q", 1)), lo);
            rep.seed = seed;
            rep.eps = drive.eps;
            po.lock = rep;
        }
        return po;
    };
    std::vector<PointOut> pts;
    if (plan.single()) {
        std::ostringstream traj;
        pts.push_back(point(0, &traj));
        out.artifacts.push_back(write_artifact(dir, "full.csv", [&](std::ostream& os) { os << traj.str(); }));
    } else {
        pts = map_indexed(ExecPolicy::Parallel, plan.values.size(), [&](std::size_t i) { return point(i, nullptr); });
    }
    std::vector<Row> rows;
    for (const auto& p : pts) rows.push_back(p.row);
    out.artifacts.push_back(write_artifact(dir, "full_summary.csv", [&](std::ostream& os) {
        write_rows(os, summary_comment(cfg, "oscillation after the transient"),
                   {plan.axis, "amplitude", "frequency", "mean_x"}, rows);
    }));
    if (pts.front().lock) {
        out.artifacts.push_back(write_artifact(dir, "lock.csv", [&](std::ostream& os) {
            os << "# " << summary_comment(cfg, "lock detection") << '\n';
            write_lock_csv_header(os);
            for (const auto& p : pts) write_lock_csv_row(os, *p.lock);
        }));
        std::size_t locked = 0;
        for (const auto& p : pts) locked += p.lock->locked ? 1 : 0;
        out.results["locked_points"] = locked;
    }
    out.points = rows.size();
    return out;
}

RunResult run_spectrogram(const RunConfig& cfg, const fs::path& dir) {
    const std::string src_name = cfg.text("spectrogram.source", "adler");
    SpectrogramSource src;
    if (src_name == "adler") {
        AdlerSource s;
        s.omega_eff = cfg.real("spectrogram.omega_eff");
        s.omega_a = cfg.real("spectrogram.omega_a");
        s.d_noise = cfg.real("spectrogram.d_noise", s.d_noise);
        s.d_tau = cfg.real("spectrogram.d_tau", s.d_tau);
        s.decimation = cfg.count("spectrogram.decimation", s.decimation);
        s.transient_tau = cfg.real("spectrogram.transient_tau", s.transient_tau);
        s.gamma_init = cfg.real("spectrogram.gamma_init", s.gamma_init);
        src = s;
    } else if (src_name == "envelope") {
        EnvelopeSource s;
        s.coeffs = coefficients_from(cfg);
        s.xi0 = cfg.real("spectrogram.xi0", 0.0);
        s.dt = cfg.real("spectrogram.dt");
        s.decimation = cfg.count("spectrogram.decimation", 1);
        s.transient = cfg.real("spectrogram.transient", 0.0);
        s.a0 = {s.coeffs.r0.value_or(0.0), 0.0};
        src = s;
    } else {
        FullSource s;
        s.cav = cavity_from(cfg);
        s.tm = thermo_from(cfg);
        const auto d = drive_from(cfg);
        s.p0 = d.p0;
        s.eps = d.eps;
        s.omega_ref = cfg.real("spectrogram.omega_ref");
        s.dt = cfg.real("spectrogram.dt");
        s.decimation = cfg.count("spectrogram.decimation", 1);
        s.transient = cfg.real("spectrogram.transient", 0.0);
        s.noise_on = cfg.flag("spectrogram.noise", false);
        s.init = full_init(cfg, s.cav, s.tm, s.p0);
        src = s;
    }
    WelchConfig w;
    w.segment_len = cfg.count("spectrogram.segment_len", w.segment_len);
    w.overlap = cfg.real("spectrogram.overlap", w.overlap);
    w.window = window_from_name(cfg.text("spectrogram.window", window_name(w.window)));
    w.segments = cfg.count("spectrogram.segments", w.segments);
    w.db_floor = cfg.real("spectrogram.db_floor", w.db_floor);

    const auto plan = plan_for(cfg);
    const std::vector<double> det = plan.sweeping ? plan.values : std::vector<double>{cfg.real("spectrogram.detuning", 0.0)};
    const auto res = sweep_spectrogram(src, det, w, cfg.seed());

    RunResult out;
    out.artifacts.push_back(write_artifact(dir, "spectrogram.csv", [&](std::ostream& os) {
        write_spectrogram_csv(os, res.spectrogram);
    }));
    out.artifacts.push_back(write_artifact(dir, "spectrogram.json", [&](std::ostream& os) {
        write_spectrogram_sidecar(os, res.spectrogram);
    }));
    const auto band = locked_band(res.spectrogram, cfg.count("spectrogram.max_spread", 10));
    if (band) {
        out.results["locked_band"] = {{"lower", band->lower},
                                      {"upper", band->upper},
                                      {"half_width", band->half_width},
                                      {"rows", band->locked_rows}};
    } else {
        out.results["locked_band"] = nullptr;
    }
    out.points = det.size();
    return out;
}

RunResult run_sensitivity(const RunConfig& cfg, const fs::path& dir) {
    const auto plan = plan_for(cfg);
    auto point = [&](std::size_t i) -> Row {
        const auto c = plan.point(cfg, i);
        const double m = c.real("sensitivity.m"), w0 = c.real("sensitivity.omega0"), g0 = c.real("sensitivity.gamma0"),
                     t = c.real("sensitivity.t_eff"), r0 = c.real("sensitivity.r0"), t_a = c.real("sensitivity.t_a");
        const auto fo = sigma_fo(g0, t, stored_energy(m, w0, r0), w0, t_a);
        Row row{plan.values[i], fo.sigma, fo.classical ? 1.0 : 0.0};
        Cell seo, degr;
        if (c.has("sensitivity.zeta0") && c.has("sensitivity.gamma_big0") && c.has("sensitivity.gamma_big2")) {
            const auto s = sigma_seo(fo.sigma, c.real("sensitivity.zeta0"), c.real("sensitivity.gamma_big0"),
                                     c.real("sensitivity.gamma_big2"));
            seo = s.sigma;
            degr = s.degradation;
        }
        row.push_back(seo);
        row.push_back(degr);
        Cell dg, resp, dw, rel;
        if (c.has("sensitivity.omega_a") && c.has("sensitivity.i_b")) {
            AdlerParams p;
            p.i_b = c.real("sensitivity.i_b");
            p.omega_a = c.real("sensitivity.omega_a");
            const double theta = g0 * kBoltzmann * t / (4.0 * m * w0 * w0);
            p.d_noise = AdlerParams::noise_from_physical(theta, p.omega_a, r0);
            const auto s = sync_sensitivity(p, p.omega_a * t_a, w0);
            dg = s.delta_gamma;
            resp = s.responsivity;
            dw = s.delta_omega;
            rel = s.relative;
        }
        for (const auto& v : {dg, resp, dw, rel}) row.push_back(v);
        return row;
    };
    const auto rows = map_indexed(ExecPolicy::Parallel, plan.values.size(), point);
    RunResult out;
    out.artifacts.push_back(write_artifact(dir, "sensitivity.csv", [&](std::ostream& os) {
        write_rows(os, summary_comment(cfg, "relative resolutions"),
                   {plan.axis, "sigma_fo", "classical", "sigma_seo", "degradation", "delta_gamma", "responsivity",
                    "delta_omega", "sync_relative"},
                   rows);
    }));
    out.points = rows.size();
    return out;
}

}  // namespace

RunResult run_scenario(const RunConfig& cfg, const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + out_dir.string() + ": " + ec.message());
    switch (cfg.scenario()) {
        case Scenario::Envelope: return run_envelope(cfg, out_dir);
        case Scenario::Full: return run_full(cfg, out_dir);
        case Scenario::Adler: return run_adler(cfg, out_dir);
        case Scenario::CircleMap: return run_circle_map(cfg, out_dir);
        case Scenario::Spectrogram: return run_spectrogram(cfg, out_dir);
        case Scenario::Sensitivity: return run_sensitivity(cfg, out_dir);
    }
    throw ConfigError("unhandled scenario");
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error(ErrorKind::Io, "sha256 init failed");
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return hex.str();
}

int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Config:
        case ErrorKind::Parameter: return 2;
        case ErrorKind::Precondition: return 3;
        case ErrorKind::Divergence: return 4;
        case ErrorKind::Io: return 5;
    }
    return 1;
}

nlohmann::json make_manifest(const RunConfig& cfg, const RunResult& run, const ManifestInfo& info) {
    nlohmann::json j;
    j["tool"] = "seo-sync";
    j["version"] = kLibraryVersion;
    j["scenario"] = scenario_name(cfg.scenario());
    j["config_path"] = info.config_path;
    j["config"] = cfg.entries();
    j["overrides"] = cfg.overrides();
    j["seed"] = cfg.seed();
    j["seed_source"] = info.seed_source;
    j["rng"] = kRngAlgorithm;
    j["jobs"] = info.jobs;
    j["wall_time_s"] = info.wall_seconds;
    if (const auto& s = cfg.sweep())
        j["sweep"] = {{"axis", s->axis}, {"min", s->min}, {"max", s->max}, {"steps", s->steps},
                      {"scale", s->log_scale ? "log" : "linear"}};
    j["points"] = run.points;
    j["results"] = run.results;
    auto arts = nlohmann::json::array();
    for (const auto& a : run.artifacts) arts.push_back({{"file", a.file}, {"sha256", a.sha256}, {"bytes", a.bytes}});
    j["artifacts"] = arts;
    return j;
}

}  // namespace seo::app
