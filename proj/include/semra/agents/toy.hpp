#pragma once

// Sanity environments with known optima for the two agents. Every episode is
// one step long, so transitions are terminal and Q equals the expected reward.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "semra/agents/dsac.hpp"
#include "semra/agents/sac.hpp"

namespace semra::agents {

struct ToyRun {
    std::size_t updates = 0;
    double score = 0.0;  // bandit: greedy accuracy; quadratic: mean greedy distance to the optimum
    double worst = 0.0;  // quadratic: largest greedy distance over the probe states
};

// Arms pay a fixed reward each; states are uniform noise the policy must learn to ignore.
ToyRun train_bandit(const std::vector<double>& arm_rewards, std::size_t updates, std::uint64_t seed,
                    const DsacConfig& cfg, std::size_t batch = 64, std::size_t state_dim = 4);

// reward = -|a - a*|^2 with a* in (-1, 1)^d.
ToyRun train_quadratic(const std::vector<double>& optimum, std::size_t updates, std::uint64_t seed,
                       const SacConfig& cfg, std::size_t batch = 64, std::size_t state_dim = 2);

}  // namespace semra::agents
