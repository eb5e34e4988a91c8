#pragma once

#include <stdexcept>
#include <string>

namespace pinnosc {

/// Shape or inner-dimension mismatch in array arithmetic.
struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid argument outside numeric trouble (unknown name, bad order, empty input).
struct ArgumentError : std::runtime_error {
    explicit ArgumentError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite value encountered; carries the offending value and where it arose.
struct NumericError : std::runtime_error {
    double value;
    explicit NumericError(const std::string& what, double offending = 0.0)
        : std::runtime_error(what), value(offending) {}
};

}  // namespace pinnosc
