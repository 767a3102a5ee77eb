#pragma once

// Discrete soft actor-critic over factored categorical heads. The actor maps
// a state to the concatenated logits of every head; each critic maps a state
// to one Q value per (head, choice). Losses are summed over heads for the
// actor and temperature and averaged over heads for the critics.

#include <cstddef>
#include <vector>

#include "semra/agents/networks.hpp"
#include "semra/agents/replay.hpp"
#include "semra/agents/sac.hpp"

namespace semra::agents {

enum class TemperatureForm {
    // E[ pi^T (-alpha log pi + H) ]: alpha only ever shrinks toward zero.
    Literal,
    // E[ alpha pi^T (-log pi + H) ]: alpha settles where the head entropy equals -H.
    EntropyTarget,
};

struct DsacConfig {
    std::vector<std::size_t> hidden{128, 128};
    ad::AdamConfig optimizer;
    double alpha_lr = 1e-4;
    double gamma = 0.99;
    double tau = 5e-3;
    double target_entropy = -1.0;
    double init_alpha = 1.0;
    bool learn_alpha = true;
    TemperatureForm temperature_form = TemperatureForm::Literal;

    void validate() const;
};

struct DsacAgent {
    DsacConfig cfg;
    std::size_t state_dim = 0;
    std::vector<std::size_t> heads;    // choices per head
    std::vector<std::size_t> offsets;  // first output column of each head
    Trainable actor;
    Trainable critic1;
    Trainable critic2;
    ad::MlpParams target1;
    ad::MlpParams target2;
    Temperature temperature;

    std::size_t outputs() const noexcept { return offsets.empty() ? 0 : offsets.back() + heads.back(); }
};

DsacAgent make_dsac(std::size_t state_dim, std::vector<std::size_t> heads, const DsacConfig& cfg, Rng& rng);

struct CategoricalHeads {
    std::vector<ad::Array> probs;      // per head, Z x K
    std::vector<ad::Array> log_probs;  // per head, Z x K
};

CategoricalHeads dsac_policy(const DsacAgent& agent, const ad::Array& states);
CategoricalHeads categorical_from_logits(const ad::Array& logits, const std::vector<std::size_t>& heads);

LossResult dsac_actor_loss(const DsacAgent& agent, const ad::Array& states);
// Per-head targets y, each Z x 1.
std::vector<ad::Array> dsac_targets(const DsacAgent& agent, const Batch& batch, double gamma);
LossResult dsac_critic_loss(const DsacAgent& agent, const Batch& batch, double gamma);
LossResult dsac_temperature_loss(const DsacAgent& agent, const ad::Array& states);

UpdateStats dsac_update(DsacAgent& agent, const Batch& batch);

std::vector<int> dsac_greedy(const DsacAgent& agent, const std::vector<double>& state);
std::vector<int> dsac_sample(const DsacAgent& agent, const std::vector<double>& state, Rng& rng);

}  // namespace semra::agents
