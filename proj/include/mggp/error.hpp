#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mggp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed prefix expression; `position` is the zero-based token index.
class ParseError : public Error {
public:
    ParseError(std::size_t position, std::string token, const std::string& what)
        : Error("parse error at token " + std::to_string(position) + " ('" + token + "'): " + what),
          position_(position), token_(std::move(token)) {}

    std::size_t position() const noexcept { return position_; }
    const std::string& token() const noexcept { return token_; }

private:
    std::size_t position_;
    std::string token_;
};

class SchemaMismatch : public Error {
public:
    explicit SchemaMismatch(std::string column)
        : Error("schema mismatch: expected column '" + column + "'"), column_(std::move(column)) {}
    const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

/// A cell that failed to parse or violates a column constraint. `row` is 1-based over data rows.
class BadValue : public Error {
public:
    BadValue(std::size_t row, std::string column, std::string token, const std::string& why)
        : Error("bad value at row " + std::to_string(row) + ", column '" + column + "' ('" + token + "'): " + why),
          row_(row), column_(std::move(column)), token_(std::move(token)) {}

    std::size_t row() const noexcept { return row_; }
    const std::string& column() const noexcept { return column_; }
    const std::string& token() const noexcept { return token_; }

private:
    std::size_t row_;
    std::string column_;
    std::string token_;
};

class ConstantColumn : public Error {
public:
    explicit ConstantColumn(std::string column)
        : Error("constant column in training data: '" + column + "'"), column_(std::move(column)) {}
    const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

class IllConditioned : public Error {
public:
    using Error::Error;
};

class DegenerateTarget : public Error {
public:
    using Error::Error;
};

class DegenerateFit : public Error {
public:
    using Error::Error;
};

/// The sun never rises or never sets at this latitude/declination.
class PolarDayNight : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace mggp
