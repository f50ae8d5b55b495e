#pragma once

#include <stdexcept>
#include <string>

namespace excessd {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input that could not be parsed (CSV rows, flags, JSON).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Structurally valid input that violates a data contract
/// (gaps, out-of-range months, missing years, window mismatches).
class DataError : public Error {
public:
    using Error::Error;
};

/// Operation invoked with arguments the API cannot honor.
class UsageError : public Error {
public:
    using Error::Error;
};

} // namespace excessd
