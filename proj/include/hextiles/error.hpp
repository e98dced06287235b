#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hextiles {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// children() called on a cell at the finest configured resolution.
class HierarchyExhausted : public Error {
public:
    using Error::Error;
};

/// parent() called on a resolution-0 cell.
class RootHasNoParent : public Error {
public:
    using Error::Error;
};

/// Malformed input text (geojson, config, index strings).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Input that parses but violates a contract. Carries every problem found.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> problems);

    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// Same shape as ValidationError, raised for tileset/encoding configuration.
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ConflictError : public Error {
public:
    using Error::Error;
};

class IncompatibleError : public Error {
public:
    using Error::Error;
};

class UnsupportedVersion : public Error {
public:
    using Error::Error;
};

class CorruptionError : public Error {
public:
    using Error::Error;
};

}  // namespace hextiles
