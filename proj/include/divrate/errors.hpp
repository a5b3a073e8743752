#pragma once

#include <stdexcept>
#include <string>

namespace divrate {

/// Base class for all library errors. Each error class carries a stable
/// process exit code (documented range 2-9) so the CLI can map failures
/// onto distinct statuses.
class Error : public std::runtime_error {
public:
    Error(const std::string& msg, int exit_code)
        : std::runtime_error(msg), exit_code_(exit_code) {}

    int exit_code() const { return exit_code_; }

private:
    int exit_code_;
};

/// Malformed input file (bad header, bad field, negative count, ...).
class ParseError : public Error {
public:
    ParseError(const std::string& msg, long line)
        : Error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg, 2),
          line_(line) {}

    long line() const { return line_; }

private:
    long line_;
};

/// Histogram volumes not strictly increasing.
class NonMonotoneVolumes : public Error {
public:
    explicit NonMonotoneVolumes(const std::string& msg) : Error(msg, 2) {}
};

/// Invalid argument or configuration value.
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& msg) : Error(msg, 3) {}
};

class NonPositiveAlpha : public InvalidArgument {
public:
    explicit NonPositiveAlpha(
        const std::string& msg = "regularization parameter alpha must be > 0")
        : InvalidArgument(msg) {}
};

class BadRange : public InvalidArgument {
public:
    explicit BadRange(const std::string& msg) : InvalidArgument(msg) {}
};

class EmptySweep : public InvalidArgument {
public:
    explicit EmptySweep(const std::string& msg = "alpha sweep holds no usable entries")
        : InvalidArgument(msg) {}
};

class TooFewPoints : public InvalidArgument {
public:
    explicit TooFewPoints(const std::string& msg) : InvalidArgument(msg) {}
};

/// Two profiles that must share a grid do not.
class GridMismatch : public Error {
public:
    explicit GridMismatch(const std::string& msg) : Error(msg, 4) {}
};

/// A density whose moments make the requested quantity undefined.
class DegenerateDensity : public Error {
public:
    explicit DegenerateDensity(const std::string& msg) : Error(msg, 5) {}
};

/// An input that violates a solver precondition (e.g. an identically
/// zero division rate handed to the eigen solver).
class DegenerateInput : public Error {
public:
    explicit DegenerateInput(const std::string& msg) : Error(msg, 5) {}
};

/// Time step too large for the transport speed on the grid.
class CflViolation : public Error {
public:
    explicit CflViolation(const std::string& msg) : Error(msg, 6) {}
};

/// A transient run produced values beyond 1e300.
class BlowUp : public Error {
public:
    explicit BlowUp(const std::string& msg) : Error(msg, 6) {}
};

/// Eigen iteration exhausted max_steps, or its two rate estimates disagree.
class NonConverged : public Error {
public:
    explicit NonConverged(const std::string& msg) : Error(msg, 7) {}
};

/// Required dataset metadata (doubling time) absent.
class MissingMetadata : public Error {
public:
    explicit MissingMetadata(const std::string& msg) : Error(msg, 8) {}
};

} // namespace divrate
