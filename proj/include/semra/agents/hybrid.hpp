#pragma once

#include <cstddef>
#include <vector>

#include "semra/agents/dsac.hpp"
#include "semra/agents/sac.hpp"
#include "semra/env/action.hpp"

namespace semra::agents {

struct HybridDecision {
    std::vector<double> continuous;  // raw, in (-1, 1)
    std::vector<int> discrete;       // U level heads, then U subchannel heads
    std::vector<double> head_probs;  // concatenated head probabilities
};

// Exploring: squashed Gaussian sample and categorical samples.
// Greedy: tanh(mean) and per-head argmax.
HybridDecision act_hybrid(const std::vector<double>& state, const SacAgent& sac, const DsacAgent& dsac, bool explore,
                          Rng& rng);

// Head layout used with the environment: U heads of N levels, then U heads of C subchannels.
std::vector<std::size_t> hybrid_heads(std::size_t users, std::size_t levels, std::size_t subchannels);

env::RawAction to_raw_action(const HybridDecision& d, std::size_t users, std::size_t levels, std::size_t subchannels);

}  // namespace semra::agents
