#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace msl {

/// Number formatting for messages: integers verbatim, reals with six significant digits.
template <class T>
std::string fmt_num(T v) {
    if constexpr (std::is_integral_v<T>) {
        return std::to_string(v);
    } else {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", static_cast<double>(v));
        return buf;
    }
}

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line and the JSON field path when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::string field)
        : Error(what), line_(line), field_(std::move(field)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

/// Well-formed input that violates a domain invariant (monotonicity, hermiticity, PSD, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Mismatched matrix dimensions or grids between two operands.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Invalid run parameters (scan step too coarse, non-positive sizes, ...).
class ConfigurationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// phi(1, lambda, tau) is numerically singular, so m_tau has a pole near lambda.
class PoleProximityError : public Error {
public:
    PoleProximityError(const std::string& what, double sigma_min)
        : Error(what), sigma_min_(sigma_min) {}
    double sigma_min() const noexcept { return sigma_min_; }

private:
    double sigma_min_;
};

/// A residue contour passed too close to a pole.
class ContourError : public Error {
public:
    using Error::Error;
};

/// An extracted norming constant is not positive semidefinite within tolerance.
class ExtractionError : public Error {
public:
    using Error::Error;
};

/// Direct-problem output violates the eigenvalue counting identity (a root was missed).
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// The Krein equation is not uniquely solvable on some [0, a]: H is not an accelerant.
class NotAnAccelerantError : public Error {
public:
    NotAnAccelerantError(const std::string& what, double x)
        : Error(what), x_(x) {}
    /// Grid point at which the truncated operator I + H^a degenerated.
    double x() const noexcept { return x_; }

private:
    double x_;
};

}  // namespace msl
