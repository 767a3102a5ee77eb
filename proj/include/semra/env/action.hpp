#pragma once

// Agent-facing raw actions and their projection onto the feasible set.
//
// Continuous raw layout, entries in (-1, 1):
//   [0, U)                 bandwidth logits
//   [U + 2M*u, U + 2M*(u+1)) user u's beam: re0, im0, re1, im1, ...
// The beam is placed on the user's assigned subchannel; other subchannels
// carry zero weights. Raw entries are scaled by sqrt(TP) before the power
// projection.

#include <cstddef>
#include <span>
#include <vector>

#include "semra/common/rng.hpp"
#include "semra/env/config.hpp"
#include "semra/phy/link.hpp"

namespace semra::env {

struct RawAction {
    std::vector<double> continuous;
    std::vector<int> level;          // per user, index into 1..N (0-based)
    std::vector<int> subchannel;     // per user, preferred subchannel
    std::vector<double> subchannel_probs;  // U x C head probabilities; empty = user order
};

struct Action {
    std::vector<int> n;                   // bits per feature, 1..N
    std::vector<std::size_t> subchannel;  // injective
    std::vector<double> bandwidth;        // Hz, sums to B
    phy::Beamformer beams;
    std::vector<double> raw_continuous;
};

std::size_t continuous_dim(const SystemConfig& cfg);

// Softmax allocation of `total` with the last share adjusted so that the
// left-to-right floating-point sum equals total exactly.
std::vector<double> allocate_bandwidth(std::span<const double> logits, double total);

// Scales all weights by sqrt(tp / P) iff P > tp, then shrinks until the
// recomputed power is <= tp. Returns the amplitude factor applied.
double project_power(phy::Beamformer& beams, double tp);

// Greedy one-to-one matching. Users are served in descending probability of
// their preferred subchannel (ties by user index); a taken preference moves
// the user to the nearest free subchannel (ties to the lower index).
std::vector<std::size_t> repair_subchannels(std::span<const int> preferred, std::span<const double> probs,
                                            std::size_t subchannels);

Action project_action(const RawAction& raw, const SystemConfig& cfg);

// Uniform raw continuous entries in (-1, 1) and uniform discrete choices.
RawAction random_raw_action(const SystemConfig& cfg, Rng& rng);

}  // namespace semra::env
