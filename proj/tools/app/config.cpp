#include "app/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "seo/constants.hpp"
#include "seo/error.hpp"
#include "seo/stats.hpp"
#include "seo/time_series.hpp"

namespace seo::app {

namespace {

enum class Kind { Real, Angular, Count, Flag, Text };

struct KeySpec {
    Kind kind;
    std::vector<std::string> choices;   // allowed values for Text keys, empty = free
};

using Schema = std::map<std::string, std::map<std::string, KeySpec>>;

const Schema& schema() {
    const KeySpec r{Kind::Real, {}}, w{Kind::Angular, {}}, n{Kind::Count, {}}, f{Kind::Flag, {}};
    static const Schema s{
        {"run", {{"scenario", {Kind::Text, {"envelope", "full", "adler", "circle-map", "spectrogram", "sensitivity"}}},
                 {"seed", {Kind::Text, {}}},
                 {"output_dir", {Kind::Text, {}}}}},
        {"sweep", {{"axis", {Kind::Text, {}}}, {"min", r}, {"max", r}, {"steps", n},
                   {"scale", {Kind::Text, {"linear", "log"}}}}},
        {"cavity", {{"t_b", r}, {"t_a", r}, {"t_r", r}, {"finesse", r}, {"lambda", r}, {"x_r", r}, {"lambda0", r},
                    {"n_eff", r}, {"length", r}}},
        {"thermo", {{"m", r}, {"omega0", w}, {"gamma0", r}, {"gamma2", r}, {"beta", r}, {"theta", r}, {"eta", r},
                    {"kappa", r}, {"t_eff", r}}},
        {"drive", {{"p0", r}, {"p1", r}, {"eps", r}, {"omega_d", w}}},
        {"envelope", {{"coefficients", {Kind::Text, {"rates", "device"}}}, {"gamma_big0", r}, {"gamma_big2", r},
                      {"omega_big0", w}, {"omega_big2", r}, {"theta_noise", r}, {"omega_d", w}, {"xi0", r},
                      {"duration", r}, {"dt", r}, {"a0_re", r}, {"a0_im", r}, {"stride", n}, {"t_a", r}}},
        {"adler", {{"i_b", r}, {"d_noise", r}, {"omega_a", w}, {"gamma_init", r}, {"duration_tau", r}, {"d_tau", r},
                   {"stride", n}}},
        {"map", {{"function", {Kind::Text, {"sine", "quadratic_cap"}}}, {"alpha", r}, {"w_a", r}, {"alpha_c", r},
                 {"theta_c", r}, {"z", r}, {"theta0", r}, {"n_transient", n}, {"n_measure", n}}},
        {"full", {{"duration", r}, {"dt", r}, {"noise", f}, {"x_offset", r}, {"stride", n}, {"record_start", r},
                  {"lock_p", n}, {"lock_q", n}, {"transient_fraction", r}}},
        {"spectrogram", {{"source", {Kind::Text, {"adler", "envelope", "full"}}}, {"detuning", r}, {"omega_eff", w},
                         {"omega_a", w}, {"d_noise", r}, {"d_tau", r}, {"decimation", n}, {"transient_tau", r},
                         {"gamma_init", r}, {"xi0", r}, {"dt", r}, {"transient", r}, {"omega_ref", w},
                         {"noise", f}, {"segment_len", n}, {"overlap", r},
                         {"window", {Kind::Text, {"hann", "rectangular", "blackman-harris"}}}, {"segments", n},
                         {"db_floor", r}, {"max_spread", n}}},
        {"sensitivity", {{"m", r}, {"omega0", w}, {"gamma0", r}, {"t_eff", r}, {"r0", r}, {"t_a", r}, {"omega_a", w},
                         {"i_b", r}, {"zeta0", r}, {"gamma_big0", r}, {"gamma_big2", r}}},
    };
    return s;
}

// Keys each scenario cannot run without.
const std::map<Scenario, std::vector<std::string>>& required_keys() {
    static const std::map<Scenario, std::vector<std::string>> req{
        {Scenario::Envelope, {"envelope.duration", "envelope.dt"}},
        {Scenario::Full, {"thermo.omega0", "thermo.gamma0", "thermo.kappa", "thermo.eta", "drive.p0", "full.duration",
                          "full.dt"}},
        {Scenario::Adler, {"adler.i_b", "adler.duration_tau", "adler.d_tau"}},
        {Scenario::CircleMap, {"map.alpha", "map.n_measure"}},
        {Scenario::Spectrogram, {"spectrogram.source"}},
        {Scenario::Sensitivity, {"sensitivity.m", "sensitivity.omega0", "sensitivity.gamma0", "sensitivity.t_eff",
                                 "sensitivity.r0", "sensitivity.t_a"}},
    };
    return req;
}

const KeySpec* lookup(const std::string& section, const std::string& key) {
    const auto s = schema().find(section);
    if (s == schema().end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

std::string trim(const std::string& v) {
    const auto b = v.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = v.find_last_not_of(" \t\r");
    return v.substr(b, e - b + 1);
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Splits "section.key" and resolves a *_hz alias. Returns {section, base key, is_hz}.
struct Resolved {
    std::string section, key;
    bool hz;
    const KeySpec* spec;
};

Resolved resolve(const std::string& section, const std::string& key, const std::string& where) {
    if (schema().find(section) == schema().end()) throw ConfigError(where + ": unknown section [" + section + "]");
    if (const auto* spec = lookup(section, key)) return {section, key, false, spec};
    if (ends_with(key, "_hz")) {
        const std::string base = key.substr(0, key.size() - 3);
        if (const auto* spec = lookup(section, base); spec && spec->kind == Kind::Angular)
            return {section, base, true, spec};
    }
    throw ConfigError(where + ": unknown key '" + key + "' in [" + section + "]");
}

std::pair<std::string, std::string> split_dotted(const std::string& dotted, const std::string& where) {
    const auto dot = dotted.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == dotted.size())
        throw ConfigError(where + ": expected section.key, got '" + dotted + "'");
    return {dotted.substr(0, dot), dotted.substr(dot + 1)};
}

}  // namespace

std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::Envelope: return "envelope";
        case Scenario::Full: return "full";
        case Scenario::Adler: return "adler";
        case Scenario::CircleMap: return "circle-map";
        case Scenario::Spectrogram: return "spectrogram";
        case Scenario::Sensitivity: return "sensitivity";
    }
    return "unknown";
}

double parse_real(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto* end = t.data() + t.size();
    const auto res = std::from_chars(t.data(), end, v);
    if (t.empty() || res.ec != std::errc() || res.ptr != end || !std::isfinite(v))
        throw ConfigError(key + ": expected a finite number, got '" + text + "'");
    return v;
}

std::uint64_t parse_seed(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    std::uint64_t v = 0;
    const auto* end = t.data() + t.size();
    const auto res = std::from_chars(t.data(), end, v);
    if (t.empty() || res.ec != std::errc() || res.ptr != end)
        throw ConfigError(what + ": expected an unsigned 64-bit integer, got '" + text + "'");
    return v;
}

std::vector<double> SweepSpec::values() const {
    if (steps == 1) return {min};
    return log_scale ? stats::logspace(min, max, steps) : stats::linspace(min, max, steps);
}

RunConfig RunConfig::parse(std::istream& is, const std::string& origin) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(origin + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    RunConfig cfg;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ConfigError(origin + ": key '" + section + "' appears outside any section");
        for (const auto& [key, value] : body) {
            if (ends_with(key, "_hz") && body.find(key.substr(0, key.size() - 3)) != body.not_found())
                throw ConfigError(origin + ": [" + section + "] gives both " + key.substr(0, key.size() - 3) + " and " + key);
            cfg.assign(section, key, value.data(), origin + ": [" + section + "] " + key);
        }
    }
    cfg.finalize();
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    return parse(in, path.string());
}

void RunConfig::assign(const std::string& section, const std::string& key, const std::string& raw,
                       const std::string& where) {
    const auto r = resolve(section, key, where);
    const std::string full = r.section + "." + r.key;
    const std::string value = trim(raw);
    std::string stored;
    switch (r.spec->kind) {
        case Kind::Real: stored = format_double(parse_real(value, full)); break;
        case Kind::Angular: {
            const double v = parse_real(value, r.hz ? full + "_hz" : full);
            stored = format_double(r.hz ? kTwoPi * v : v);
            break;
        }
        case Kind::Count: {
            const double v = parse_real(value, full);
            if (v < 0.0 || v != std::floor(v)) throw ConfigError(full + ": expected a non-negative integer");
            stored = format_double(v);
            break;
        }
        case Kind::Flag:
            if (value != "true" && value != "false") throw ConfigError(full + ": expected true or false");
            stored = value;
            break;
        case Kind::Text:
            if (!r.spec->choices.empty() &&
                std::find(r.spec->choices.begin(), r.spec->choices.end(), value) == r.spec->choices.end()) {
                std::string opts;
                for (const auto& c : r.spec->choices) opts += (opts.empty() ? "" : ", ") + c;
                throw ConfigError(full + ": '" + value + "' is not one of " + opts);
            }
            stored = value;
            break;
    }
    entries_[full] = stored;
}

void RunConfig::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "': expected section.key=value");
    const auto [section, key] = split_dotted(trim(assignment.substr(0, eq)), "override '" + assignment + "'");
    overrides_.push_back(assignment);
    assign(section, key, assignment.substr(eq + 1), "override '" + assignment + "'");
    finalize();
}

void RunConfig::finalize() {
    if (!entries_.count("run.scenario")) throw ConfigError("[run] scenario is required");
    const std::string sc = entries_.at("run.scenario");
    for (Scenario s : {Scenario::Envelope, Scenario::Full, Scenario::Adler, Scenario::CircleMap, Scenario::Spectrogram,
                       Scenario::Sensitivity})
        if (scenario_name(s) == sc) scenario_ = s;
    seed_ = entries_.count("run.seed") ? parse_seed(entries_.at("run.seed"), "run.seed") : 0;

    for (const auto& key : required_keys().at(scenario_))
        if (!entries_.count(key))
            throw ConfigError("scenario " + sc + " requires " + key);
    if (scenario_ == Scenario::Spectrogram) {
        const std::string src = entries_.at("spectrogram.source");
        std::vector<std::string> need{"spectrogram.omega_eff", "spectrogram.omega_a"};
        if (src == "envelope") need = {"spectrogram.dt"};
        if (src == "full") need = {"thermo.omega0", "thermo.gamma0", "thermo.kappa", "thermo.eta", "drive.p0",
                                   "spectrogram.dt", "spectrogram.omega_ref"};
        for (const auto& key : need)
            if (!entries_.count(key)) throw ConfigError("spectrogram source " + src + " requires " + key);
    }
    if (scenario_ == Scenario::Envelope || (scenario_ == Scenario::Spectrogram && entries_.at("spectrogram.source") == "envelope")) {
        if (text("envelope.coefficients", "rates") == "rates") {
            for (const auto& key : {"envelope.gamma_big0", "envelope.gamma_big2"})
                if (!entries_.count(key)) throw ConfigError("envelope rates require " + std::string(key));
        } else if (!entries_.count("thermo.omega0") || !entries_.count("drive.p0")) {
            throw ConfigError("envelope.coefficients = device requires the [thermo] and [drive] blocks");
        }
    }

    sweep_.reset();
    const bool any_sweep = std::any_of(entries_.begin(), entries_.end(),
                                       [](const auto& e) { return e.first.rfind("sweep.", 0) == 0; });
    if (any_sweep) {
        for (const auto& key : {"sweep.axis", "sweep.min", "sweep.max", "sweep.steps"})
            if (!entries_.count(key)) throw ConfigError("[sweep] requires " + std::string(key));
        SweepSpec s;
        const auto [section, key] = split_dotted(entries_.at("sweep.axis"), "sweep.axis");
        const auto r = resolve(section, key, "sweep.axis");
        if (r.spec->kind != Kind::Real && r.spec->kind != Kind::Angular && r.spec->kind != Kind::Count)
            throw ConfigError("sweep.axis: " + section + "." + key + " is not numeric");
        if (section == "run" || section == "sweep") throw ConfigError("sweep.axis: cannot sweep [" + section + "]");
        s.axis = r.section + "." + r.key;
        const double scale = r.hz ? kTwoPi : 1.0;
        s.min = scale * real("sweep.min");
        s.max = scale * real("sweep.max");
        s.steps = count("sweep.steps", 1);
        s.log_scale = text("sweep.scale", "linear") == "log";
        if (s.steps < 1) throw ConfigError("sweep.steps must be >= 1");
        if (s.log_scale && !(s.min > 0.0 && s.max > 0.0)) throw ConfigError("log sweep needs min, max > 0");
        if (scenario_ == Scenario::Spectrogram && s.axis != "spectrogram.detuning")
            throw ConfigError("spectrogram sweeps run over spectrogram.detuning");
        sweep_ = s;
    }
}

std::optional<std::string> RunConfig::output_dir() const {
    if (const auto it = entries_.find("run.output_dir"); it != entries_.end()) return it->second;
    return std::nullopt;
}

bool RunConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

bool RunConfig::has_section(const std::string& section) const {
    const std::string prefix = section + ".";
    return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first.rfind(prefix, 0) == 0; });
}

double RunConfig::real(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("missing required key " + key);
    return parse_real(it->second, key);
}

double RunConfig::real(const std::string& key, double fallback) const {
    return has(key) ? real(key) : fallback;
}

std::size_t RunConfig::count(const std::string& key, std::size_t fallback) const {
    return has(key) ? static_cast<std::size_t>(real(key)) : fallback;
}

bool RunConfig::flag(const std::string& key, bool fallback) const {
    return has(key) ? entries_.at(key) == "true" : fallback;
}

std::string RunConfig::text(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

RunConfig RunConfig::with(const std::string& key, double value) const {
    RunConfig c = *this;
    c.entries_[key] = format_double(value);
    return c;
}

}  // namespace seo::app
