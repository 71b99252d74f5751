#pragma once

#include <stdexcept>
#include <string>

namespace distsel {

// Base class for all errors raised by the library. Violations of documented
// preconditions throw InvalidArgument; malformed input files throw ParseError.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row, std::size_t col)
        : Error(what), row_(row), col_(col) {}

    // 1-based position of the offending cell (0 when not applicable).
    std::size_t row() const noexcept { return row_; }
    std::size_t col() const noexcept { return col_; }

private:
    std::size_t row_;
    std::size_t col_;
};

} // namespace distsel
