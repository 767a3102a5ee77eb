#pragma once

// Joint training of the continuous and discrete agents on the environment,
// greedy evaluation with common random numbers, and the baseline policies.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "semra/agents/dsac.hpp"
#include "semra/agents/hybrid.hpp"
#include "semra/agents/sac.hpp"
#include "semra/env/environment.hpp"

namespace semra::agents {

struct TrainerConfig {
    std::size_t episodes = 50;
    std::size_t batch_size = 256;
    std::size_t replay_capacity = 20000;
    std::size_t updates_per_step = 1;
    // Hard-copy interval for the target critics in units of updates; 1 means
    // soft updates every update and no hard copies.
    std::size_t target_interval = 1;
    std::size_t random_steps = 0;  // uniform random actions before the policy acts
    std::size_t compensator_batches = 1;  // per step, when not frozen
    bool freeze_compensator = false;
    std::size_t pretrain_compensator_batches = 200;  // up front, when frozen
    bool shared_replay = true;
    double reward_scale = 1.0;

    void validate() const;
};

struct EpisodeLog {
    std::size_t episode = 0;
    double mean_reward = 0.0;
    double mean_sc_qos = 0.0;
    double mean_similarity = 0.0;
    double mean_sqe = 0.0;
    double mean_latency = 0.0;  // capped, seconds
    double mean_n = 0.0;
    double sac_critic_loss = 0.0;
    double sac_actor_loss = 0.0;
    double dsac_critic_loss = 0.0;
    double dsac_actor_loss = 0.0;
    double sac_alpha = 0.0;
    double dsac_alpha = 0.0;
    double compensator_loss = 0.0;
    std::size_t updates = 0;
};

struct TrainedPolicy {
    SacAgent sac;
    DsacAgent dsac;
    semantic::CompensatorParams compensator;
};

struct TrainResult {
    TrainedPolicy policy;
    std::vector<EpisodeLog> episodes;
    std::size_t updates = 0;
};

// Named sub-streams: "train-env", "agent-init", "sampling".
// Throws TrainingError (with episode, step and last losses) on divergence.
TrainResult train(const env::EnvConfig& env_cfg, const SacConfig& sac_cfg, const DsacConfig& dsac_cfg,
                  const TrainerConfig& cfg, std::uint64_t seed,
                  const std::function<void(env::Environment&)>& on_env = {});

// Trains `target`'s compensator for `batches` mini-batches on a scratch
// environment with random allocations (sub-stream "compensator-pretrain").
void pretrain_compensator(env::Environment& target, const env::EnvConfig& env_cfg, std::size_t batches,
                          std::uint64_t seed);

// Maps the current state (and environment, for its channel) to a projected action.
using Policy = std::function<env::Action(const std::vector<double>& state, const env::Environment& env)>;

struct EvalResult {
    double mean_sc_qos = 0.0;
    double mean_reward = 0.0;
    double mean_similarity = 0.0;
    double mean_sqe = 0.0;
    double mean_latency = 0.0;
    double mean_n = 0.0;
    std::vector<double> step_sc_qos;  // one entry per evaluated step
};

using StepSink = std::function<void(std::size_t episode, std::size_t step, const env::Action& action,
                                    const env::StepOutcome& outcome)>;

// Fresh environment on `seed`, so policies evaluated on the same seed see
// identical channels, items and noise.
EvalResult evaluate_policy(const env::EnvConfig& env_cfg, std::uint64_t seed,
                           const semantic::CompensatorParams& compensator, const Policy& policy, std::size_t episodes,
                           std::size_t steps, const StepSink& on_step = {});

Policy greedy_policy(const TrainedPolicy& p);
Policy random_policy(std::uint64_t seed);
// Level n for everyone, user u on subchannel u, equal bandwidth and MRT beams
// with equal power. Ignores the state.
Policy fixed_policy(int n);
// Levels uniform at random; bandwidth, beams and subchannels from the trained agents.
Policy rate_only_policy(const TrainedPolicy& p, std::uint64_t seed);

// Bucketed record of the gated similarity (mean over items of validity * Im)
// per SBQ level, keyed by floor(snr_db / width).
struct MappingTable {
    double bucket_db = 5.0;
    int levels = 3;
    std::map<long, std::vector<double>> sum;    // per level
    std::map<long, std::vector<double>> count;  // per level

    long bucket(double snr_linear) const;
    // Nearest populated bucket's mean; nullopt when the table is empty for n.
    std::optional<double> predict(double snr_linear, int n) const;
    void record(double snr_linear, int n, double gated_similarity);
};

// Runs `episodes` x `steps` with the trained allocation and uniformly random
// levels, recording every user's outcome. Uses its own environment seed.
MappingTable calibrate_mapping(const env::EnvConfig& env_cfg, const TrainedPolicy& p, double bucket_db,
                               std::uint64_t seed, std::size_t episodes, std::size_t steps);

// Which SNR the mapping lookup sees: the one measured on the previous
// transmission (what a feedback loop reports) or the exact SNR of the action
// about to be sent (genie channel knowledge).
enum class SnrSource { Previous, Current };

// Per user, picks the n maximising predicted gated similarity / n - phi_g * latency,
// with latency from the allocated bandwidth at the looked-up SNR. Throws
// ConfigError on an empty table.
Policy mapping_guided_policy(const TrainedPolicy& p, const MappingTable& table,
                             SnrSource source = SnrSource::Previous);

}  // namespace semra::agents
