#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace paircorr {

/// Argument outside the domain covered by a table or zero list.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Malformed or insufficient caller input (precondition violation).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A request would exceed a configured memory budget.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Zero file or cache file could not be parsed.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A numerical procedure failed to certify its result.
class ComputationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quadrature did not reach the requested tolerance.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double achieved)
        : std::runtime_error(what + " (achieved error estimate " + std::to_string(achieved) + ")"),
          achieved_(achieved) {}

    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

namespace detail {

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw InputError(msg);
}

inline void require_range(bool ok, const std::string& msg) {
    if (!ok) throw RangeError(msg);
}

} // namespace detail

} // namespace paircorr
