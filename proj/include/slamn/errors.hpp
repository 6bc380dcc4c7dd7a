#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slamn {

/// Invalid or inconsistent configuration; surfaces as exit status 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A filter produced a non-finite intermediate; surfaces as exit status 3.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, std::size_t step)
        : std::runtime_error(what + " at step " + std::to_string(step)), step_(step) {}
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

/// Two CSV files cannot be compared column-for-column.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reading an input file or writing an output file failed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace slamn
