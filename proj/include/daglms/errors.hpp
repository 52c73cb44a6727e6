#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace daglms {

/// Invalid configuration or argument. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numeric precondition does not hold (e.g. roots on or outside the unit circle).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or unsupported input file.
class IngestionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The adaptation blew up: non-finite data or a weight norm above the guard.
/// Maps to CLI exit code 3.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, std::size_t sample, double weight_norm)
        : std::runtime_error(what), sample_(sample), weight_norm_(weight_norm) {}

    std::size_t sample() const noexcept { return sample_; }
    double weight_norm() const noexcept { return weight_norm_; }

private:
    std::size_t sample_;
    double weight_norm_;
};

} // namespace daglms
