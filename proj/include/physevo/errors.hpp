#pragma once

#include <stdexcept>
#include <string>

namespace physevo {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonFiniteInput : Error {
    explicit NonFiniteInput(const std::string& msg) : Error(msg) {}
};

struct UnknownFidelity : Error {
    explicit UnknownFidelity(const std::string& msg) : Error(msg) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

struct SeedOutOfBounds : Error {
    explicit SeedOutOfBounds(const std::string& msg) : Error(msg) {}
};

struct InvalidVariantParameters : Error {
    explicit InvalidVariantParameters(const std::string& msg) : Error(msg) {}
};

/// Integration blow-up; carries the time at which the state went non-finite.
struct NonFiniteState : Error {
    double time;
    NonFiniteState(const std::string& msg, double t) : Error(msg), time(t) {}
};

struct DegenerateGeometry : Error {
    explicit DegenerateGeometry(const std::string& msg) : Error(msg) {}
};

struct NonPositiveConductivity : Error {
    explicit NonPositiveConductivity(const std::string& msg) : Error(msg) {}
};

struct SingularAfterBc : Error {
    explicit SingularAfterBc(const std::string& msg) : Error(msg) {}
};

struct NotPositiveDefinite : Error {
    explicit NotPositiveDefinite(const std::string& msg) : Error(msg) {}
};

struct NoConvergence : Error {
    explicit NoConvergence(const std::string& msg) : Error(msg) {}
};

struct SampleMismatch : Error {
    explicit SampleMismatch(const std::string& msg) : Error(msg) {}
};

struct InvalidParams : Error {
    explicit InvalidParams(const std::string& msg) : Error(msg) {}
};

struct UnsupportedStrategy : Error {
    explicit UnsupportedStrategy(const std::string& msg) : Error(msg) {}
};

struct InclusionOutsideDomain : Error {
    explicit InclusionOutsideDomain(const std::string& msg) : Error(msg) {}
};

struct InvalidSpline : Error {
    explicit InvalidSpline(const std::string& msg) : Error(msg) {}
};

struct SelfIntersecting : Error {
    explicit SelfIntersecting(const std::string& msg) : Error(msg) {}
};

struct DegenerateArchive : Error {
    explicit DegenerateArchive(const std::string& msg) : Error(msg) {}
};

struct UnpairedRuns : Error {
    explicit UnpairedRuns(const std::string& msg) : Error(msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Config syntax error; carries the 1-based source location.
struct ParseError : ConfigError {
    int line, column;
    ParseError(const std::string& msg, int l, int c)
        : ConfigError(msg + " (line " + std::to_string(l) + ", column " + std::to_string(c) + ")"),
          line(l),
          column(c) {}
};

struct UnknownKey : ConfigError {
    explicit UnknownKey(const std::string& msg) : ConfigError(msg) {}
};

struct MissingRequired : ConfigError {
    explicit MissingRequired(const std::string& msg) : ConfigError(msg) {}
};

struct MissingArchive : Error {
    explicit MissingArchive(const std::string& msg) : Error(msg) {}
};

}  // namespace physevo
