#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uzv {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operand shapes do not conform.
class DimensionError : public Error {
public:
    using Error::Error;
};

// An argument is outside the documented domain (rank out of range, negative threshold, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

// An iterative kernel hit its iteration cap.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::size_t iterations)
        : Error(what + " (after " + std::to_string(iterations) + " iterations)"),
          iterations_(iterations) {}

    std::size_t iterations() const noexcept { return iterations_; }

private:
    std::size_t iterations_;
};

// Malformed or unreadable input data. Carries the byte offset where parsing stopped.
class DataError : public Error {
public:
    DataError(const std::string& what, std::size_t offset)
        : Error(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

}  // namespace uzv
