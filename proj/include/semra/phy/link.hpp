#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "semra/common/rng.hpp"

namespace semra::phy {

using cd = std::complex<double>;

struct PathLossModel {
    double reference_gain_db = 30.0;  // PL^ref
    double reference_distance_m = 1.0;
    double exponent = 3.0;
};

// Large-scale channel gain in dB (negative = attenuation):
// PL^ref - 10 * exponent * log10(d / D^ref). Throws DomainError for d <= 0.
double path_gain_db(double distance_m, const PathLossModel& model = {});

struct LinkBudget {
    double distance_m = 1.0;
    double path_gain_db = 30.0;
    double noise_var = 0.01;  // linear
    double k_factor = 2.0;    // Rician K, linear

    void validate() const;
};

// One Rician draw per antenna: sqrt(g) * (sqrt(K/(K+1)) e^{j theta_m} + sqrt(1/(K+1)) CN(0,1)),
// g = 10^{PL/10}. The antenna count is los_phases.size().
std::vector<cd> sample_rician(const LinkBudget& budget, std::span<const double> los_phases, Rng& rng);
// Same, with LOS phases drawn uniformly on [0, 2 pi).
std::vector<cd> sample_rician(const LinkBudget& budget, std::size_t antennas, Rng& rng);

// Scalar link h^T f (no conjugation).
cd beam_gain(std::span<const cd> h, std::span<const cd> f);
double post_beamforming_snr(std::span<const cd> h, std::span<const cd> f, double noise_var);

// b * log2(1 + |h^T f|^2 / noise_var) in bit/s.
double transmission_rate(double bandwidth_hz, std::span<const cd> h, std::span<const cd> f, double noise_var);
double transmission_rate(double bandwidth_hz, double snr);

// Per-user, per-subchannel antenna vectors, laid out [user][subchannel][antenna].
struct ChannelRealization {
    std::size_t users = 0;
    std::size_t subchannels = 0;
    std::size_t antennas = 0;
    std::size_t snapshot = 0;
    std::vector<cd> h;

    ChannelRealization() = default;
    ChannelRealization(std::size_t u, std::size_t c, std::size_t m)
        : users(u), subchannels(c), antennas(m), h(u * c * m) {}
    std::span<const cd> at(std::size_t u, std::size_t c) const { return {h.data() + (u * subchannels + c) * antennas, antennas}; }
    std::span<cd> at(std::size_t u, std::size_t c) { return {h.data() + (u * subchannels + c) * antennas, antennas}; }
    std::span<const cd> user(std::size_t u) const { return {h.data() + u * subchannels * antennas, subchannels * antennas}; }
};

// Transmit weights with the same layout as ChannelRealization.
struct Beamformer {
    std::size_t users = 0;
    std::size_t subchannels = 0;
    std::size_t antennas = 0;
    std::vector<cd> f;

    Beamformer() = default;
    Beamformer(std::size_t u, std::size_t c, std::size_t m) : users(u), subchannels(c), antennas(m), f(u * c * m) {}
    std::span<const cd> at(std::size_t u, std::size_t c) const { return {f.data() + (u * subchannels + c) * antennas, antennas}; }
    std::span<cd> at(std::size_t u, std::size_t c) { return {f.data() + (u * subchannels + c) * antennas, antennas}; }
    double total_power() const;
};

// 10^{(dBm - 30)/10} watts.
double dbm_to_watts(double dbm);
double db_to_linear(double db);
double linear_to_db(double x);

}  // namespace semra::phy
