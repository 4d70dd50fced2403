#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gridreg {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller supplied an argument outside the documented domain.
class InputError : public Error {
public:
    using Error::Error;
};

/// Raster or matrix shapes disagree.
class DimensionError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

/// Minimal point set does not determine a transform (collinear sources).
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// A provider or caller broke a contract the library relies on.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Non-finite value encountered where a finite one is required.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Malformed binary or text file. Carries the byte offset of the failure.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::uint64_t offset)
        : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Ground-truth mapping sends no evaluated pixel inside the reference.
class NoOverlapError : public Error {
public:
    using Error::Error;
};

/// Median or rate requested over an empty population.
class EmptyInputError : public Error {
public:
    using Error::Error;
};

}  // namespace gridreg
