#pragma once

// Multi-user downlink semantic transmission as an MDP.
//
// State layout (all blocks concatenated in this order):
//   previous raw continuous action    U + 2MU
//   previous SBQ level one-hot        U * N
//   previous subchannel one-hot       U * C
//   next items' mean embedding        U * L_e   (unit norm per user)
//   channel, re/im interleaved        U * 2CM   (unit norm per user)
//   per-user SQE                      U
//   per-user latency / g_th, <= cap   U
//   reward / ((w_im + w_g) U bonus)   1

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "semra/autodiff/adam.hpp"
#include "semra/env/action.hpp"
#include "semra/env/config.hpp"
#include "semra/phy/link.hpp"
#include "semra/qos/metrics.hpp"
#include "semra/semantic/compensator.hpp"
#include "semra/semantic/source.hpp"

namespace semra::env {

struct StateLayout {
    std::size_t prev_continuous = 0;
    std::size_t prev_level = 0;
    std::size_t prev_subchannel = 0;
    std::size_t embeddings = 0;
    std::size_t channels = 0;
    std::size_t sqe = 0;
    std::size_t latency = 0;
    std::size_t reward = 0;
    std::size_t dim = 0;
};

StateLayout make_layout(const EnvConfig& cfg);

struct ConstraintReport {
    bool level_binary = true;         // zeta entries in {0, 1}
    bool level_one_hot = true;        // one level per user
    bool subchannel_binary = true;    // rho entries in {0, 1}
    bool subchannel_one_per_user = true;
    bool subchannel_injective = true;  // no two users share a subchannel
    bool bandwidth_budget = true;      // sum b <= B
    bool power_budget = true;          // sum |f|^2 <= TP
    bool latency = true;               // every user within g_th
    bool similarity = true;            // every user at or above im_th
    std::vector<double> latency_violation;     // per user, max(0, G - g_th)
    std::vector<double> similarity_violation;  // per user, max(0, im_th - Im)

    bool feasible_allocation() const {
        return level_binary && level_one_hot && subchannel_binary && subchannel_one_per_user && subchannel_injective &&
               bandwidth_budget && power_budget;
    }
};

ConstraintReport constraint_check(const Action& a, const qos::MetricsSnapshot& m, const EnvConfig& cfg);

struct StepOutcome {
    std::vector<double> next_state;
    double reward = 0.0;
    qos::MetricsSnapshot metrics;
    ConstraintReport constraints;
    bool done = false;
};

struct StepTrace {
    std::size_t episode = 0;
    std::size_t step = 0;
    std::size_t state_dim = 0;
    const Action* action = nullptr;
    const StepOutcome* outcome = nullptr;
};

class Environment {
public:
    // Named sub-streams of `seed` drive geometry and fading ("env"), the
    // catalogs ("source"), per-step items and channel noise ("noise") and the
    // compensator ("compensator"). Item and noise draws depend only on
    // (episode, step, user), so different policies see the same randomness.
    Environment(EnvConfig cfg, std::uint64_t seed);

    const EnvConfig& config() const noexcept { return cfg_; }
    const StateLayout& layout() const noexcept { return layout_; }
    std::size_t state_dim() const noexcept { return layout_.dim; }
    std::size_t continuous_dim() const { return env::continuous_dim(cfg_.system); }
    std::size_t users() const noexcept { return cfg_.system.users; }
    std::size_t subchannels() const noexcept { return cfg_.system.subchannels; }
    int levels() const noexcept { return cfg_.system.sbq_levels; }

    std::vector<double> reset();
    StepOutcome step(const Action& action);
    Action project(const RawAction& raw) const { return project_action(raw, cfg_.system); }

    const phy::ChannelRealization& channel() const noexcept { return channel_; }
    const std::vector<double>& distances() const noexcept { return distances_; }
    const std::vector<double>& state() const noexcept { return state_; }
    double sbq_threshold() const noexcept { return p_th_; }
    const semantic::SourceModel& source() const noexcept { return source_; }
    // Items the next step() will transmit, per user.
    const std::vector<std::vector<semantic::SemanticEmbedding>>& items() const noexcept { return items_; }
    // Metrics of the most recent transmission (the warm-up one right after reset).
    const qos::MetricsSnapshot& last_metrics() const noexcept { return last_metrics_; }
    std::size_t episode() const noexcept { return episode_; }
    std::size_t t() const noexcept { return t_; }

    // Post-beamforming SNR of each user under the current channel.
    std::vector<double> snr(const Action& action) const;

    semantic::CompensatorParams& compensator() noexcept { return compensator_; }
    const semantic::CompensatorParams& compensator() const noexcept { return compensator_; }
    void set_compensator(const semantic::CompensatorParams& p);
    // Compensator mini-batches over the current channel with `action`'s links.
    semantic::EpochResult train_compensator(const Action& action, std::size_t batches);

    void set_trace(std::function<void(const StepTrace&)> sink) { trace_ = std::move(sink); }

private:
    std::vector<semantic::PipelineLink> links(const Action& action) const;
    void draw_channel();
    void draw_items(std::uint64_t stream);
    std::uint64_t step_stream() const;
    qos::MetricsSnapshot transmit(const Action& action, std::uint64_t stream);
    void assemble_state(const Action& previous, const qos::MetricsSnapshot& m);

    EnvConfig cfg_;
    StateLayout layout_;
    std::uint64_t seed_;
    Rng env_rng_;
    Rng compensator_rng_;
    semantic::SourceModel source_;
    double p_th_ = 0.0;
    semantic::CompensatorParams compensator_;
    ad::AdamState compensator_adam_;

    std::vector<double> distances_;
    std::vector<std::vector<double>> los_phases_;
    phy::ChannelRealization channel_;
    std::vector<std::vector<semantic::SemanticEmbedding>> items_;
    std::vector<double> state_;
    qos::MetricsSnapshot last_metrics_;
    double reward_sum_ = 0.0;
    std::size_t episode_ = 0;
    std::size_t t_ = 0;
    bool started_ = false;
    std::function<void(const StepTrace&)> trace_;
};

}  // namespace semra::env
