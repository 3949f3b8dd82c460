#pragma once

#include <stdexcept>
#include <string>

namespace polarmin {

// Bad flag values, invalid configuration combinations. CLI maps this to exit 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or missing input data (files, rows, schemas). CLI maps this to exit 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace polarmin
