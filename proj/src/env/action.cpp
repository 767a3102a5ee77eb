#include "semra/env/action.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "semra/common/errors.hpp"

namespace semra::env {

std::size_t continuous_dim(const SystemConfig& cfg) { return cfg.users + 2 * cfg.antennas * cfg.users; }

std::vector<double> allocate_bandwidth(std::span<const double> logits, double total) {
    if (logits.empty()) throw DimensionError("allocate_bandwidth: no users");
    const double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> w(logits.size());
    double z = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) z += (w[i] = std::exp(logits[i] - mx));
    double head = 0.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) head += (w[i] = total * w[i] / z);
    double& last = w.back();
    last = std::max(0.0, total - head);
    auto sum = [&] {
        double s = 0.0;
        for (double x : w) s += x;
        return s;
    };
    for (int guard = 0; guard < 64; ++guard) {
        const double s = sum();
        if (s == total) break;
        last = s < total ? std::nextafter(last, total) : std::nextafter(last, 0.0);
    }
    return w;
}

double project_power(phy::Beamformer& beams, double tp) {
    if (!(tp >= 0.0)) throw DomainError("project_power: power budget must be non-negative");
    const double p = beams.total_power();
    if (!(p > tp)) return 1.0;
    double factor = std::sqrt(tp / p);
    auto scaled_power = [&](double k) {
        double acc = 0.0;
        for (const auto& x : beams.f) acc += std::norm(x * k);
        return acc;
    };
    while (scaled_power(factor) > tp) factor = std::nextafter(factor, 0.0);
    for (auto& x : beams.f) x *= factor;
    return factor;
}

std::vector<std::size_t> repair_subchannels(std::span<const int> preferred, std::span<const double> probs,
                                            std::size_t subchannels) {
    const std::size_t users = preferred.size();
    if (subchannels < users) throw DomainError("repair_subchannels: fewer subchannels than users");
    if (!probs.empty() && probs.size() != users * subchannels)
        throw DimensionError("repair_subchannels: probability table has wrong size");
    std::vector<std::size_t> order(users);
    std::iota(order.begin(), order.end(), 0);
    auto score = [&](std::size_t u) {
        if (probs.empty()) return 0.0;
        const auto c = static_cast<std::size_t>(std::clamp<int>(preferred[u], 0, static_cast<int>(subchannels) - 1));
        return probs[u * subchannels + c];
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score(a) > score(b); });

    std::vector<bool> taken(subchannels, false);
    std::vector<std::size_t> out(users, 0);
    for (std::size_t u : order) {
        const auto want = static_cast<std::size_t>(std::clamp<int>(preferred[u], 0, static_cast<int>(subchannels) - 1));
        std::size_t pick = want;
        if (taken[want]) {
            for (std::size_t d = 1; d < subchannels; ++d) {
                if (want >= d && !taken[want - d]) {
                    pick = want - d;
                    break;
                }
                if (want + d < subchannels && !taken[want + d]) {
                    pick = want + d;
                    break;
                }
            }
        }
        taken[pick] = true;
        out[u] = pick;
    }
    return out;
}

Action project_action(const RawAction& raw, const SystemConfig& cfg) {
    const std::size_t U = cfg.users, M = cfg.antennas, C = cfg.subchannels;
    if (raw.continuous.size() != continuous_dim(cfg))
        throw DimensionError("project_action: continuous part has " + std::to_string(raw.continuous.size()) +
                             " entries, expected " + std::to_string(continuous_dim(cfg)));
    if (raw.level.size() != U || raw.subchannel.size() != U)
        throw DimensionError("project_action: discrete part must have one entry per user");

    Action a;
    a.raw_continuous = raw.continuous;
    a.n.resize(U);
    for (std::size_t u = 0; u < U; ++u) a.n[u] = std::clamp(raw.level[u], 0, cfg.sbq_levels - 1) + 1;
    a.subchannel = repair_subchannels(raw.subchannel, raw.subchannel_probs, C);
    a.bandwidth = allocate_bandwidth(std::span(raw.continuous).first(U), cfg.bandwidth_hz);

    const double tp = cfg.tx_power_w();
    // A raw entry of magnitude 1 maps to an antenna amplitude of sqrt(TP), so
    // all but near-zero raw beams exceed the budget and land on it after scaling.
    const double amp = std::sqrt(tp);
    a.beams = phy::Beamformer(U, C, M);
    for (std::size_t u = 0; u < U; ++u) {
        auto f = a.beams.at(u, a.subchannel[u]);
        const double* r = raw.continuous.data() + U + 2 * M * u;
        for (std::size_t m = 0; m < M; ++m) f[m] = amp * phy::cd(r[2 * m], r[2 * m + 1]);
    }
    project_power(a.beams, tp);
    return a;
}

RawAction random_raw_action(const SystemConfig& cfg, Rng& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> level(0, cfg.sbq_levels - 1);
    std::uniform_int_distribution<int> sub(0, static_cast<int>(cfg.subchannels) - 1);
    RawAction r;
    r.continuous.resize(continuous_dim(cfg));
    for (auto& x : r.continuous) x = u(rng);
    for (std::size_t k = 0; k < cfg.users; ++k) {
        r.level.push_back(level(rng));
        r.subchannel.push_back(sub(rng));
    }
    return r;
}

}  // namespace semra::env
