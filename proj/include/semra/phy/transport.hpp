#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "semra/common/rng.hpp"
#include "semra/phy/qam16.hpp"

namespace semra::phy {

enum class TransportMode { MonteCarlo, AnalyticFlip };

struct TransportResult {
    Bits bits;
    double snr = 0.0;
    double ber = 0.0;         // analytic BER at snr (the flip probability in AnalyticFlip mode)
    bool no_signal = false;   // |h^T f| == 0 in Monte-Carlo mode; bits are uniform noise
};

// Closed-form bit error probability of Gray 16-QAM on AWGN with coherent
// equalisation at per-symbol SNR `snr` (linear). With a = sqrt(snr/5):
//   BER = [3 Q(a) + 2 Q(3a) - Q(5a)] / 4.
// Throws DomainError for snr < 0.
double analytic_ber(double snr);

// Inverse of analytic_ber on (0, 0.5]: the SNR giving bit error rate p.
// Throws DomainError outside that interval.
double snr_for_ber(double p);

// Sends bits over the scalar link y = g s + CN(0, noise_var) (Monte-Carlo), or
// flips each bit with probability analytic_ber(|g|^2 / noise_var).
// Consumes exactly one draw from rng; noise comes from chunked sub-streams.
TransportResult transport_bits(std::span<const std::uint8_t> bits, std::complex<double> gain, double noise_var,
                               TransportMode mode, Rng& rng);
TransportResult transport_bits(std::span<const std::uint8_t> bits, std::span<const std::complex<double>> h,
                               std::span<const std::complex<double>> f, double noise_var, TransportMode mode,
                               Rng& rng);

// Flips each bit independently with probability p.
Bits flip_bits(std::span<const std::uint8_t> bits, double p, Rng& rng);

}  // namespace semra::phy
