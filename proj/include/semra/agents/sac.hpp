#pragma once

// Continuous soft actor-critic with a tanh-squashed Gaussian policy and twin
// critics Q(s, a). Loss functions take the reparameterisation noise
// explicitly so they are deterministic functions of the parameters.

#include <cmath>
#include <cstddef>
#include <vector>

#include "semra/agents/networks.hpp"
#include "semra/agents/replay.hpp"
#include "semra/autodiff/adam.hpp"
#include "semra/autodiff/mlp.hpp"
#include "semra/common/rng.hpp"

namespace semra::agents {

inline const double kLogStdMin = std::log(1e-4);
inline const double kLogStdMax = std::log(10.0);
inline constexpr double kSquashEps = 1e-6;

struct SacConfig {
    std::vector<std::size_t> hidden{128, 128};
    ad::AdamConfig optimizer;  // actor and critics
    double alpha_lr = 1e-4;
    double gamma = 0.99;
    double tau = 5e-3;
    double target_entropy = -1.0;
    double init_alpha = 1.0;
    bool learn_alpha = true;

    void validate() const;
};

struct SacAgent {
    SacConfig cfg;
    std::size_t state_dim = 0;
    std::size_t action_dim = 0;
    Trainable actor;  // state -> [mean | log_std]
    Trainable critic1;
    Trainable critic2;
    ad::MlpParams target1;
    ad::MlpParams target2;
    Temperature temperature;
};

SacAgent make_sac(std::size_t state_dim, std::size_t action_dim, const SacConfig& cfg, Rng& rng);

struct GaussianHead {
    ad::Array mean;     // Z x A
    ad::Array log_std;  // Z x A, clamped
};

GaussianHead sac_policy(const SacAgent& agent, const ad::Array& states);

struct SquashedSample {
    ad::Array action;    // tanh(mean + std * noise), Z x A
    ad::Array noise;     // Z x A
    ad::Array log_prob;  // Z x 1
};

// Deterministic given the noise.
SquashedSample squash_with_noise(const ad::Array& mean, const ad::Array& log_std, const ad::Array& noise);
// Draws standard normal noise. Throws DomainError for a non-positive std.
SquashedSample squashed_sample(const ad::Array& mean, const ad::Array& std_dev, Rng& rng);

ad::Array standard_normal(std::size_t rows, std::size_t cols, Rng& rng);

// Critic value Q(s, a) as a Z x 1 column, without recording gradients.
ad::Array critic_value(const ad::MlpParams& critic, const ad::Array& states, const ad::Array& actions);

struct LossResult {
    double value = 0.0;
    std::vector<ad::ParamGrads> grads;  // one entry per trained network
    double grad_log_alpha = 0.0;
};

LossResult sac_actor_loss(const SacAgent& agent, const ad::Array& states, const ad::Array& noise);
// grads[0], grads[1] belong to critic1, critic2.
LossResult sac_critic_loss(const SacAgent& agent, const Batch& batch, const ad::Array& next_noise, double gamma);
// Bellman targets y (Z x 1) used by sac_critic_loss.
ad::Array sac_targets(const SacAgent& agent, const Batch& batch, const ad::Array& next_noise, double gamma);
LossResult sac_temperature_loss(const SacAgent& agent, const ad::Array& states, const ad::Array& noise);

struct UpdateStats {
    double critic_loss = 0.0;
    double actor_loss = 0.0;
    double temperature_loss = 0.0;
    double alpha = 0.0;
};

// Critics, then actor, then temperature, then soft target updates.
// Throws TrainingError on a non-finite loss.
UpdateStats sac_update(SacAgent& agent, const Batch& batch, Rng& rng);

// tanh(mean), one row.
std::vector<double> sac_greedy(const SacAgent& agent, const std::vector<double>& state);

}  // namespace semra::agents
