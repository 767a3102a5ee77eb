#include "semra/phy/transport.hpp"

#include <cmath>

#include "semra/common/errors.hpp"
#include "semra/kernels/bit_channel.hpp"
#include "semra/phy/link.hpp"

namespace semra::phy {
namespace {
double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }
}  // namespace

double analytic_ber(double snr) {
    if (!(snr >= 0.0)) throw DomainError("analytic_ber: SNR must be non-negative");
    const double a = std::sqrt(snr / 5.0);
    return (3.0 * q_function(a) + 2.0 * q_function(3.0 * a) - q_function(5.0 * a)) / 4.0;
}

double snr_for_ber(double p) {
    if (!(p > 0.0 && p <= 0.5)) throw DomainError("snr_for_ber: target must be in (0, 0.5]");
    if (p == 0.5) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (analytic_ber(hi) > p) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (analytic_ber(mid) > p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Bits flip_bits(std::span<const std::uint8_t> bits, double p, Rng& rng) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("flip_bits: probability outside [0, 1]");
    Bits out(bits.size());
    kernels::flip_bits(bits, out, p, rng());
    return out;
}

TransportResult transport_bits(std::span<const std::uint8_t> bits, std::complex<double> gain, double noise_var,
                               TransportMode mode, Rng& rng) {
    if (!(noise_var > 0.0)) throw DomainError("transport_bits: noise variance must be positive");
    TransportResult r;
    r.snr = std::norm(gain) / noise_var;
    r.ber = analytic_ber(r.snr);
    const std::uint64_t seed = rng();

    if (mode == TransportMode::AnalyticFlip) {
        r.bits.resize(bits.size());
        kernels::flip_bits(bits, r.bits, r.ber, seed);
        return r;
    }
    if (std::abs(gain) == 0.0) {
        // Nothing reaches the receiver: its decisions are coin flips.
        r.no_signal = true;
        r.bits.resize(bits.size());
        kernels::flip_bits(bits, r.bits, 0.5, seed);
        return r;
    }
    const std::size_t padded = (bits.size() + kBitsPerSymbol - 1) / kBitsPerSymbol * kBitsPerSymbol;
    Bits in(bits.begin(), bits.end());
    in.resize(padded, 0);
    Bits out(padded);
    kernels::qam16_awgn(in, out, gain, noise_var, seed);
    out.resize(bits.size());
    r.bits = std::move(out);
    return r;
}

TransportResult transport_bits(std::span<const std::uint8_t> bits, std::span<const std::complex<double>> h,
                               std::span<const std::complex<double>> f, double noise_var, TransportMode mode,
                               Rng& rng) {
    return transport_bits(bits, beam_gain(h, f), noise_var, mode, rng);
}

}  // namespace semra::phy
