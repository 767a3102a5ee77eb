#include "semra/phy/link.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "semra/common/errors.hpp"

namespace semra::phy {

double path_gain_db(double distance_m, const PathLossModel& model) {
    if (!(distance_m > 0.0)) throw DomainError("path_gain_db: distance must be positive");
    return model.reference_gain_db - 10.0 * model.exponent * std::log10(distance_m / model.reference_distance_m);
}

void LinkBudget::validate() const {
    if (!(distance_m > 0.0)) throw DomainError("LinkBudget: distance must be positive");
    if (!(noise_var > 0.0)) throw DomainError("LinkBudget: noise variance must be positive");
    if (!(k_factor >= 0.0)) throw DomainError("LinkBudget: K-factor must be non-negative");
}

std::vector<cd> sample_rician(const LinkBudget& budget, std::span<const double> los_phases, Rng& rng) {
    budget.validate();
    const double amp = std::sqrt(db_to_linear(budget.path_gain_db));
    const double k = budget.k_factor;
    const double los = std::sqrt(k / (k + 1.0));
    const double nlos = std::sqrt(1.0 / (k + 1.0));
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    std::vector<cd> h(los_phases.size());
    for (std::size_t m = 0; m < h.size(); ++m) {
        const double re = n(rng);
        const double im = n(rng);
        h[m] = amp * (los * std::polar(1.0, los_phases[m]) + nlos * cd(re, im));
    }
    return h;
}

std::vector<cd> sample_rician(const LinkBudget& budget, std::size_t antennas, Rng& rng) {
    if (antennas == 0) throw DomainError("sample_rician: need at least one antenna");
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    std::vector<double> phases(antennas);
    for (auto& p : phases) p = u(rng);
    return sample_rician(budget, phases, rng);
}

cd beam_gain(std::span<const cd> h, std::span<const cd> f) {
    if (h.size() != f.size()) throw DimensionError("beam_gain: h and f lengths differ");
    cd acc{};
    for (std::size_t m = 0; m < h.size(); ++m) acc += h[m] * f[m];
    return acc;
}

double post_beamforming_snr(std::span<const cd> h, std::span<const cd> f, double noise_var) {
    if (!(noise_var > 0.0)) throw DomainError("noise variance must be positive");
    return std::norm(beam_gain(h, f)) / noise_var;
}

double transmission_rate(double bandwidth_hz, double snr) {
    if (!(bandwidth_hz >= 0.0)) throw DomainError("transmission_rate: bandwidth must be non-negative");
    if (!(snr >= 0.0)) throw DomainError("transmission_rate: SNR must be non-negative");
    return bandwidth_hz * std::log2(1.0 + snr);
}

double transmission_rate(double bandwidth_hz, std::span<const cd> h, std::span<const cd> f, double noise_var) {
    return transmission_rate(bandwidth_hz, post_beamforming_snr(h, f, noise_var));
}

double Beamformer::total_power() const {
    double p = 0.0;
    for (const auto& x : f) p += std::norm(x);
    return p;
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double x) { return 10.0 * std::log10(x); }

}  // namespace semra::phy
