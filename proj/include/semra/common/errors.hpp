#pragma once

#include <stdexcept>
#include <string>

namespace semra {

// Shape or length disagreement between operands.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// API misuse, e.g. backprop on a graph that was never evaluated.
struct UsageError : std::logic_error {
    using std::logic_error::logic_error;
};

// Non-finite gradients or losses during optimisation.
struct TrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid or inconsistent configuration. Carries the offending field path.
struct ConfigError : std::invalid_argument {
    ConfigError(std::string field, const std::string& what)
        : std::invalid_argument(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Bitstream length does not match the declared payload.
struct FramingError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Code value outside the decodable range.
struct DecodeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// Threshold estimation on an unusable sample.
struct EstimationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace semra
