#pragma once

// Gray-mapped square 16-QAM with unit average symbol energy.
//
// Bits are consumed four per symbol, MSB first: (b0, b1) select the in-phase
// level and (b2, b3) the quadrature level, each via the per-axis Gray map
// 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3, scaled by 1/sqrt(10).

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace semra::phy {

using cd = std::complex<double>;
using Bits = std::vector<std::uint8_t>;

inline constexpr std::size_t kBitsPerSymbol = 4;
inline const double kQam16Scale = 0.31622776601683794;  // 1/sqrt(10)

struct ModemFrame {
    Bits bits;  // payload, unpadded
    std::vector<cd> symbols;
    std::size_t padding = 0;  // zero bits appended before mapping
};

cd qam16_map(std::uint8_t b0, std::uint8_t b1, std::uint8_t b2, std::uint8_t b3) noexcept;
// Minimum-distance hard decision; writes four bits.
void qam16_slice(cd y, std::uint8_t* out) noexcept;

// All 16 points indexed by the 4-bit label b0b1b2b3.
std::array<cd, 16> qam16_constellation();

ModemFrame qam16_modulate(std::span<const std::uint8_t> bits);
// Returns 4 bits per symbol, then truncates to payload_bits when given.
Bits qam16_demodulate(std::span<const cd> symbols);
Bits qam16_demodulate(std::span<const cd> symbols, std::size_t payload_bits);

}  // namespace semra::phy
