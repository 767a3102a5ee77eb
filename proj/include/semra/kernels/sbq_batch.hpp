#pragma once

// Elementwise quantize-reconstruct over a feature batch.

#include <span>

#include "semra/sbq/codec.hpp"

namespace semra::kernels {

namespace serial {
void sbq_roundtrip(std::span<const double> in, std::span<double> out, const sbq::SbqConfig& cfg);
// Returns the sum of squared reconstruction errors.
double sbq_squared_error(std::span<const double> in, const sbq::SbqConfig& cfg);
}  // namespace serial

namespace parallel {
void sbq_roundtrip(std::span<const double> in, std::span<double> out, const sbq::SbqConfig& cfg);
double sbq_squared_error(std::span<const double> in, const sbq::SbqConfig& cfg);
}  // namespace parallel

void sbq_roundtrip(std::span<const double> in, std::span<double> out, const sbq::SbqConfig& cfg);
double sbq_squared_error(std::span<const double> in, const sbq::SbqConfig& cfg);

}  // namespace semra::kernels
