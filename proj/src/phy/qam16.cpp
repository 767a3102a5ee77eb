#include "semra/phy/qam16.hpp"

#include <cmath>

namespace semra::phy {
namespace {

// Gray pair -> level in {-3, -1, 1, 3}.
constexpr double level(std::uint8_t hi, std::uint8_t lo) noexcept {
    if (hi == 0) return lo == 0 ? -3.0 : -1.0;
    return lo == 0 ? 3.0 : 1.0;
}

inline void slice_axis(double x, std::uint8_t* out) noexcept {
    out[0] = x > 0.0 ? 1 : 0;
    out[1] = std::abs(x) < 2.0 ? 1 : 0;
}

}  // namespace

cd qam16_map(std::uint8_t b0, std::uint8_t b1, std::uint8_t b2, std::uint8_t b3) noexcept {
    return {level(b0, b1) * kQam16Scale, level(b2, b3) * kQam16Scale};
}

void qam16_slice(cd y, std::uint8_t* out) noexcept {
    slice_axis(y.real() / kQam16Scale, out);
    slice_axis(y.imag() / kQam16Scale, out + 2);
}

std::array<cd, 16> qam16_constellation() {
    std::array<cd, 16> pts{};
    for (unsigned label = 0; label < 16; ++label)
        pts[label] = qam16_map((label >> 3) & 1u, (label >> 2) & 1u, (label >> 1) & 1u, label & 1u);
    return pts;
}

ModemFrame qam16_modulate(std::span<const std::uint8_t> bits) {
    ModemFrame frame;
    frame.bits.assign(bits.begin(), bits.end());
    const std::size_t n_sym = (bits.size() + kBitsPerSymbol - 1) / kBitsPerSymbol;
    frame.padding = n_sym * kBitsPerSymbol - bits.size();
    frame.symbols.reserve(n_sym);
    auto bit = [&](std::size_t i) -> std::uint8_t { return i < bits.size() ? (bits[i] & 1u) : 0; };
    for (std::size_t s = 0; s < n_sym; ++s) {
        const std::size_t i = s * kBitsPerSymbol;
        frame.symbols.push_back(qam16_map(bit(i), bit(i + 1), bit(i + 2), bit(i + 3)));
    }
    return frame;
}

Bits qam16_demodulate(std::span<const cd> symbols) {
    Bits out(symbols.size() * kBitsPerSymbol);
    for (std::size_t s = 0; s < symbols.size(); ++s) qam16_slice(symbols[s], out.data() + s * kBitsPerSymbol);
    return out;
}

Bits qam16_demodulate(std::span<const cd> symbols, std::size_t payload_bits) {
    Bits out = qam16_demodulate(symbols);
    if (payload_bits < out.size()) out.resize(payload_bits);
    return out;
}

}  // namespace semra::phy
