#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace wpc {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: bad magic, unknown enum byte, bad header field.
class FormatError : public Error {
public:
    using Error::Error;
};

// Structurally valid stream cut short or internally inconsistent.
class CorruptionError : public Error {
public:
    CorruptionError(const std::string& what, std::uint64_t event_index)
        : Error(what), event_index(event_index) {}
    std::uint64_t event_index = 0;
};

// Text input that fails to parse; line is 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line) : Error(what), line(line) {}
    std::size_t line = 0;
};

// CSV header missing a required column.
class SchemaError : public Error {
public:
    using Error::Error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

// A fusion input whose observations are all zero: attribution would be fabricated.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

// Pearson over a zero-variance series.
class UndefinedCorrelationError : public Error {
public:
    using Error::Error;
};

// A store lookup or pipeline stage that lacks a required entry.
class MissingDataError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    IoError(const std::string& what, std::uint64_t position) : Error(what), position(position) {}
    std::uint64_t position = 0;
};

}  // namespace wpc
