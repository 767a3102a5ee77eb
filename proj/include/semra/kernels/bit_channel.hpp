#pragma once

// Bit-level channel kernels. Work is split into fixed-size chunks, each with
// its own RNG sub-stream derived from (seed, chunk index), so the serial and
// OpenMP versions produce identical output for any thread count.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>

namespace semra::kernels {

inline constexpr std::size_t kChunkSymbols = 1024;
inline constexpr std::size_t kChunkBits = 4096;

// in.size() must be a multiple of 4; out has the same size.
namespace serial {
void qam16_awgn(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, std::complex<double> gain,
                double noise_var, std::uint64_t seed);
void flip_bits(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, double p, std::uint64_t seed);
}  // namespace serial

namespace parallel {
void qam16_awgn(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, std::complex<double> gain,
                double noise_var, std::uint64_t seed);
void flip_bits(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, double p, std::uint64_t seed);
}  // namespace parallel

void qam16_awgn(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, std::complex<double> gain,
                double noise_var, std::uint64_t seed);
void flip_bits(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, double p, std::uint64_t seed);

}  // namespace semra::kernels
