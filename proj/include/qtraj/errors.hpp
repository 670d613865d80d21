#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qtraj {

// Root of every error thrown by the library. The CLI maps subclasses onto
// exit codes, so new failure modes should derive from the closest match.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

// Two fields sampled on different grids, or sequences of the wrong length.
class ShapeError : public Error {
public:
    using Error::Error;
};

class DegenerateStateError : public Error {
public:
    using Error::Error;
};

// A value outside the domain of a formula, e.g. a non-positive density
// at a point that was not node-masked.
class DomainError : public Error {
public:
    using Error::Error;
};

class BoundaryLeakError : public Error {
public:
    BoundaryLeakError(const std::string& what, double time, double amplitude)
        : Error(what), time_(time), amplitude_(amplitude) {}
    double time() const noexcept { return time_; }
    double amplitude() const noexcept { return amplitude_; }

private:
    double time_;
    double amplitude_;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class InitializationError : public Error {
public:
    using Error::Error;
};

// Raised when the congruence would lose single-valuedness (J <= 0).
class CrossingError : public Error {
public:
    CrossingError(const std::string& what, double label, double time)
        : Error(what), label_(label), time_(time) {}
    double label() const noexcept { return label_; }
    double time() const noexcept { return time_; }

private:
    double label_;
    double time_;
};

class InstabilityError : public Error {
public:
    InstabilityError(const std::string& what, double time) : Error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class ReconstructionError : public Error {
public:
    using Error::Error;
};

class UnmeasurablePointError : public Error {
public:
    using Error::Error;
};

// Aggregates every violation found while validating a configuration.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace qtraj
