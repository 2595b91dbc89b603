#pragma once

#include <stdexcept>
#include <string>

namespace heatbv {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NonPositiveLength : Error {
    explicit NonPositiveLength(const std::string& w) : Error(w) {}
};

struct ResolutionTooSmall : Error {
    explicit ResolutionTooSmall(const std::string& w) : Error(w) {}
};

struct NonPositiveTime : Error {
    explicit NonPositiveTime(const std::string& w) : Error(w) {}
};

struct SpectralTruncationInsufficient : Error {
    explicit SpectralTruncationInsufficient(const std::string& w) : Error(w) {}
};

struct UnsupportedGeometry : Error {
    explicit UnsupportedGeometry(const std::string& w) : Error(w) {}
};

struct NoDerivativeSource : Error {
    explicit NoDerivativeSource(const std::string& w) : Error(w) {}
};

struct NoBoundaryOracle : Error {
    explicit NoBoundaryOracle(const std::string& w) : Error(w) {}
};

struct UnsortedBreakpoints : Error {
    explicit UnsortedBreakpoints(const std::string& w) : Error(w) {}
};

struct RadiusBelowResolution : Error {
    explicit RadiusBelowResolution(const std::string& w) : Error(w) {}
};

struct ResolutionGuardViolated : Error {
    explicit ResolutionGuardViolated(const std::string& w) : Error(w) {}
};

struct DegenerateFit : Error {
    explicit DegenerateFit(const std::string& w) : Error(w) {}
};

struct SpaceTooLarge : Error {
    explicit SpaceTooLarge(const std::string& w) : Error(w) {}
};

struct PairBudgetExceeded : Error {
    explicit PairBudgetExceeded(const std::string& w) : Error(w) {}
};

struct IoError : Error {
    explicit IoError(const std::string& w) : Error(w) {}
};

/// Config parse failure with source position, formatted as "file:line:col: message".
struct ConfigParse : Error {
    int line = 0;
    int column = 0;
    ConfigParse(const std::string& w, int line_, int col_)
        : Error(w + " (line " + std::to_string(line_) + ", column " + std::to_string(col_) + ")"),
          line(line_), column(col_) {}
};

}  // namespace heatbv
