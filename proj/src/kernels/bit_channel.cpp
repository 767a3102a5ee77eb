#include "semra/kernels/bit_channel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "semra/common/errors.hpp"
#include "semra/common/rng.hpp"
#include "semra/phy/qam16.hpp"

namespace semra::kernels {
namespace {

void check(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, bool symbols) {
    if (in.size() != out.size()) throw DimensionError("bit channel: input and output sizes differ");
    if (symbols && in.size() % phy::kBitsPerSymbol != 0)
        throw DimensionError("bit channel: bit count is not a multiple of 4");
}

void awgn_chunk(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, std::complex<double> gain,
                double noise_var, std::uint64_t seed, std::size_t chunk) {
    const std::size_t n_sym = in.size() / phy::kBitsPerSymbol;
    const std::size_t first = chunk * kChunkSymbols;
    const std::size_t last = std::min(n_sym, first + kChunkSymbols);
    Rng rng(rng::derive(seed, chunk));
    std::normal_distribution<double> noise(0.0, std::sqrt(noise_var / 2.0));
    for (std::size_t s = first; s < last; ++s) {
        const std::uint8_t* b = in.data() + s * phy::kBitsPerSymbol;
        const auto sym = phy::qam16_map(b[0], b[1], b[2], b[3]);
        const double re = noise(rng);
        const double im = noise(rng);
        const std::complex<double> y = gain * sym + std::complex<double>(re, im);
        phy::qam16_slice(y / gain, out.data() + s * phy::kBitsPerSymbol);
    }
}

void flip_chunk(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, double p, std::uint64_t seed,
                std::size_t chunk) {
    const std::size_t first = chunk * kChunkBits;
    const std::size_t last = std::min(in.size(), first + kChunkBits);
    Rng rng(rng::derive(seed, chunk));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = first; i < last; ++i) out[i] = static_cast<std::uint8_t>((in[i] & 1u) ^ (u(rng) < p ? 1u : 0u));
}

std::size_t symbol_chunks(std::size_t bits) {
    const std::size_t n_sym = bits / phy::kBitsPerSymbol;
    return (n_sym + kChunkSymbols - 1) / kChunkSymbols;
}

std::size_t bit_chunks(std::size_t bits) { return (bits + kChunkBits - 1) / kChunkBits; }

}  // namespace

namespace serial {

void qam16_awgn(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, std::complex<double> gain,
                double noise_var, std::uint64_t seed) {
    check(in, out, true);
    const std::size_t chunks = symbol_chunks(in.size());
    for (std::size_t c = 0; c < chunks; ++c) awgn_chunk(in, out, gain, noise_var, seed, c);
}

void flip_bits(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, double p, std::uint64_t seed) {
    check(in, out, false);
    const std::size_t chunks = bit_chunks(in.size());
    for (std::size_t c = 0; c < chunks; ++c) flip_chunk(in, out, p, seed, c);
}

}  // namespace serial

namespace parallel {

void qam16_awgn(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, std::complex<double> gain,
                double noise_var, std::uint64_t seed) {
    check(in, out, true);
    const auto chunks = static_cast<std::int64_t>(symbol_chunks(in.size()));
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < chunks; ++c) awgn_chunk(in, out, gain, noise_var, seed, static_cast<std::size_t>(c));
}

void flip_bits(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, double p, std::uint64_t seed) {
    check(in, out, false);
    const auto chunks = static_cast<std::int64_t>(bit_chunks(in.size()));
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < chunks; ++c) flip_chunk(in, out, p, seed, static_cast<std::size_t>(c));
}

}  // namespace parallel

void qam16_awgn(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, std::complex<double> gain,
                double noise_var, std::uint64_t seed) {
    if (symbol_chunks(in.size()) > 1)
        parallel::qam16_awgn(in, out, gain, noise_var, seed);
    else
        serial::qam16_awgn(in, out, gain, noise_var, seed);
}

void flip_bits(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, double p, std::uint64_t seed) {
    if (bit_chunks(in.size()) > 1)
        parallel::flip_bits(in, out, p, seed);
    else
        serial::flip_bits(in, out, p, seed);
}

}  // namespace semra::kernels
