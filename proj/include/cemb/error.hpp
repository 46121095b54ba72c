#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cemb {

/// Bad input: malformed files, violated preconditions, inconsistent flag
/// combinations. Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Validation failure tied to a location in an input file.
class ParseError : public ValidationError {
public:
    ParseError(const std::string& path, std::size_t line, const std::string& what)
        : ValidationError(path + ":" + std::to_string(line) + ": " + what) {}

    ParseError(const std::string& path, const std::string& what)
        : ValidationError(path + ": " + what) {}
};

/// Environment failure: file unreadable or unwritable. Maps to CLI exit
/// code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cemb
