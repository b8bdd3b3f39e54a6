#pragma once

#include <stdexcept>
#include <string>

namespace cohort_pulse {

/// Base class for all library errors. Carries the name of the module that
/// raised it so pipeline drivers can tag failures.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(what), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

// -- ingest ------------------------------------------------------------

/// Fatal input problem: unreadable stream or malformed header.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error("ingest", what) {}
};

/// Requested (participant, measure) has no records.
class EmptySeries : public Error {
public:
    explicit EmptySeries(const std::string& what) : Error("ingest", what) {}
};

// -- configuration -----------------------------------------------------

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config", what) {}
};

// -- preprocess --------------------------------------------------------

/// Series too short or too sparse for a year-cycle fit.
class FitDataInsufficient : public Error {
public:
    explicit FitDataInsufficient(const std::string& what) : Error("preprocess", what) {}
};

/// Sinusoid optimizer failed to produce a finite optimum.
class FitDiverged : public Error {
public:
    explicit FitDiverged(const std::string& what) : Error("preprocess", what) {}
};

class BaselineDataInsufficient : public Error {
public:
    explicit BaselineDataInsufficient(const std::string& what) : Error("preprocess", what) {}
};

/// Dispersion is zero (all observations equal); normalization undefined.
class DegenerateDispersion : public Error {
public:
    explicit DegenerateDispersion(const std::string& what) : Error("preprocess", what) {}
};

/// Series is already in the unit the operation would produce.
class UnitError : public Error {
public:
    explicit UnitError(const std::string& what) : Error("preprocess", what) {}
};

// -- lmm ----------------------------------------------------------------

class EncodeError : public Error {
public:
    explicit EncodeError(const std::string& what) : Error("lmm", what) {}
};

class RankDeficient : public Error {
public:
    explicit RankDeficient(const std::string& what) : Error("lmm", what) {}
};

class OptimFailed : public Error {
public:
    explicit OptimFailed(const std::string& what) : Error("lmm", what) {}
};

}  // namespace cohort_pulse
