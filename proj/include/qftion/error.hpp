#pragma once

#include <stdexcept>
#include <string>

namespace qftion {

// Base of every error raised by the library. The C API maps each subclass to
// a stable status code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid physical argument (non-positive width, co-moving packets, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(int line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

// The packets cannot be reduced to the effective three-parameter coupling form.
class ReductionError : public Error {
public:
    using Error::Error;
};

class DimensionCapError : public Error {
public:
    using Error::Error;
};

// Boson truncation too small: top Fock level got populated.
class TruncationError : public Error {
public:
    TruncationError(double time, double population);
    double time() const noexcept { return time_; }
    double population() const noexcept { return population_; }

private:
    double time_;
    double population_;
};

// The spectator qubit left its sigma_x eigenspace.
class EncodingError : public Error {
public:
    using Error::Error;
};

} // namespace qftion
