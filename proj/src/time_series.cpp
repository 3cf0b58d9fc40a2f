#include "seo/time_series.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace seo {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

template <typename T>
void write_header(std::ostream& os, const TimeSeries<T>& ts, const char* kind) {
    os << "# dt=" << format_double(ts.dt()) << " seed=" << ts.seed() << " t0=" << format_double(ts.t0())
       << " kind=" << kind << '\n';
    if (ts.frame_omega() != 0.0) os << "# frame_omega=" << format_double(ts.frame_omega()) << '\n';
}

double parse_double(std::string_view s, std::size_t line_no) {
    double v = 0.0;
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParameterError("time-series CSV: bad number on line " + std::to_string(line_no));
    return v;
}

}  // namespace

void write_csv(std::ostream& os, const RealSeries& ts) {
    write_header(os, ts, "real");
    for (double v : ts.values()) os << format_double(v) << '\n';
}

void write_csv(std::ostream& os, const ComplexSeries& ts) {
    write_header(os, ts, "complex");
    for (const cplx& v : ts.values()) os << format_double(v.real()) << ',' << format_double(v.imag()) << '\n';
}

LoadedSeries read_csv(std::istream& is) {
    double dt = 0.0, t0 = 0.0, frame = 0.0;
    std::uint64_t seed = 0;
    bool complex_kind = false, have_header = false;
    std::vector<cplx> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream fields(line.substr(1));
            std::string tok;
            while (fields >> tok) {
                auto eq = tok.find('=');
                if (eq == std::string::npos) continue;
                std::string key = tok.substr(0, eq);
                std::string val = tok.substr(eq + 1);
                if (key == "dt") { dt = parse_double(val, line_no); have_header = true; }
                else if (key == "t0") t0 = parse_double(val, line_no);
                else if (key == "seed") seed = std::stoull(val);
                else if (key == "kind") complex_kind = (val == "complex");
                else if (key == "frame_omega") frame = parse_double(val, line_no);
            }
            continue;
        }
        if (!have_header) throw ParameterError("time-series CSV: missing '# dt=...' header");
        std::string_view sv(line);
        if (complex_kind) {
            auto comma = sv.find(',');
            if (comma == std::string_view::npos)
                throw ParameterError("time-series CSV: expected re,im on line " + std::to_string(line_no));
            values.emplace_back(parse_double(sv.substr(0, comma), line_no), parse_double(sv.substr(comma + 1), line_no));
        } else {
            values.emplace_back(parse_double(sv, line_no), 0.0);
        }
    }
    return LoadedSeries{ComplexSeries(dt, std::move(values), seed, t0, frame), complex_kind};
}

}  // namespace seo
