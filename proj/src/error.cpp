#include "seo/error.hpp"

namespace seo {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Parameter: return "parameter";
        case ErrorKind::Precondition: return "precondition";
        case ErrorKind::Divergence: return "divergence";
        case ErrorKind::Config: return "config";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

void rethrow_with_prefix(const Error& e, const std::string& prefix) {
    const std::string what = prefix + e.what();
    if (const auto* d = dynamic_cast<const DivergenceError*>(&e)) throw DivergenceError(what, d->time());
    switch (e.kind()) {
        case ErrorKind::Parameter: throw ParameterError(what);
        case ErrorKind::Precondition: throw PreconditionError(what);
        case ErrorKind::Config: throw ConfigError(what);
        default: throw Error(e.kind(), what);
    }
}

}  // namespace seo
