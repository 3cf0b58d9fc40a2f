#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace seo {

// Coarse failure classes; the CLI maps them to exit codes.
enum class ErrorKind {
    Parameter,      // invalid physical input
    Precondition,   // step guard, too-short series, wrong regime
    Divergence,     // non-finite state during integration
    Config,         // config parse / unknown key
    Io,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& what) : Error(ErrorKind::Parameter, what) {}
};

class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& what) : Error(ErrorKind::Precondition, what) {}
};

class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double time)
        : Error(ErrorKind::Divergence, what), time_(time) {}

    // Simulation time at which the state stopped being finite.
    [[nodiscard]] double time() const noexcept { return time_; }

private:
    double time_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

// Throws a copy of `e` with `prefix` prepended to the message, keeping the
// concrete class so callers can still catch by type.
[[noreturn]] void rethrow_with_prefix(const Error& e, const std::string& prefix);

}  // namespace seo
