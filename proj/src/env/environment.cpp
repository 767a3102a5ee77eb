#include "semra/env/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "semra/common/errors.hpp"
#include "semra/phy/transport.hpp"

namespace semra::env {
namespace {

constexpr double kLatencyStateCap = 10.0;

void normalize_into(std::span<const double> v, std::span<double> out) {
    double n2 = 0.0;
    for (double x : v) n2 += x * x;
    const double inv = n2 > 0.0 ? 1.0 / std::sqrt(n2) : 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * inv;
}

}  // namespace

StateLayout make_layout(const EnvConfig& cfg) {
    const auto& s = cfg.system;
    const std::size_t U = s.users, C = s.subchannels, M = s.antennas;
    const auto N = static_cast<std::size_t>(s.sbq_levels);
    StateLayout l;
    std::size_t at = 0;
    l.prev_continuous = at;
    at += continuous_dim(s);
    l.prev_level = at;
    at += U * N;
    l.prev_subchannel = at;
    at += U * C;
    l.embeddings = at;
    at += U * cfg.source.embedding_len;
    l.channels = at;
    at += U * 2 * C * M;
    l.sqe = at;
    at += U;
    l.latency = at;
    at += U;
    l.reward = at;
    at += 1;
    l.dim = at;
    return l;
}

ConstraintReport constraint_check(const Action& a, const qos::MetricsSnapshot& m, const EnvConfig& cfg) {
    const auto& s = cfg.system;
    const std::size_t U = s.users, C = s.subchannels;
    const auto N = static_cast<std::size_t>(s.sbq_levels);
    ConstraintReport r;
    if (a.n.size() != U || a.subchannel.size() != U || a.bandwidth.size() != U)
        throw DimensionError("constraint_check: action has the wrong number of users");

    for (std::size_t u = 0; u < U; ++u) {
        std::vector<int> zeta(N, 0), rho(C, 0);
        if (a.n[u] >= 1 && static_cast<std::size_t>(a.n[u]) <= N) zeta[static_cast<std::size_t>(a.n[u] - 1)] = 1;
        if (a.subchannel[u] < C) rho[a.subchannel[u]] = 1;
        int zs = 0, rs = 0;
        for (int z : zeta) {
            r.level_binary = r.level_binary && (z == 0 || z == 1);
            zs += z;
        }
        for (int x : rho) {
            r.subchannel_binary = r.subchannel_binary && (x == 0 || x == 1);
            rs += x;
        }
        r.level_one_hot = r.level_one_hot && zs == 1;
        r.subchannel_one_per_user = r.subchannel_one_per_user && rs == 1;
        for (std::size_t v = u + 1; v < U; ++v) r.subchannel_injective = r.subchannel_injective && a.subchannel[u] != a.subchannel[v];
    }
    double b = 0.0;
    for (double x : a.bandwidth) {
        r.bandwidth_budget = r.bandwidth_budget && x >= 0.0;
        b += x;
    }
    r.bandwidth_budget = r.bandwidth_budget && b <= s.bandwidth_hz;
    r.power_budget = a.beams.total_power() <= s.tx_power_w();

    r.latency_violation.assign(U, 0.0);
    r.similarity_violation.assign(U, 0.0);
    for (std::size_t u = 0; u < m.users.size() && u < U; ++u) {
        const auto& um = m.users[u];
        if (!(um.latency <= cfg.qos.g_th)) {
            r.latency = false;
            r.latency_violation[u] = um.latency - cfg.qos.g_th;
        }
        if (um.similarity < cfg.qos.im_th) {
            r.similarity = false;
            r.similarity_violation[u] = cfg.qos.im_th - um.similarity;
        }
    }
    return r;
}

Environment::Environment(EnvConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)),
      seed_(seed),
      env_rng_(rng::make(seed, "env")),
      compensator_rng_(rng::make(seed, "compensator")) {
    cfg_.validate();
    layout_ = make_layout(cfg_);
    Rng source_rng = rng::make(seed, "source");
    source_ = semantic::make_source(cfg_.source, cfg_.system.users, source_rng);

    std::vector<double> pooled;
    for (const auto& cat : source_.catalogs)
        for (const auto& item : cat) pooled.insert(pooled.end(), item.begin(), item.end());
    p_th_ = sbq::estimate_threshold(pooled, cfg_.system.threshold_strategy);

    Rng init = rng::make(seed, "compensator-init");
    compensator_ = semantic::make_compensator(cfg_.source.embedding_len, cfg_.compensator_hidden, init);
    ad::AdamConfig ac;
    ac.learning_rate = cfg_.compensator_lr;
    compensator_adam_ = ad::make_adam(compensator_, ac);
}

void Environment::set_compensator(const semantic::CompensatorParams& p) {
    if (p.input_dim() != cfg_.source.embedding_len || p.output_dim() != cfg_.source.embedding_len)
        throw DimensionError("set_compensator: dimension differs from the embedding length");
    compensator_ = p;
    ad::AdamConfig ac;
    ac.learning_rate = cfg_.compensator_lr;
    compensator_adam_ = ad::make_adam(compensator_, ac);
}

std::uint64_t Environment::step_stream() const {
    return rng::derive(rng::derive(rng::derive(seed_, "noise"), static_cast<std::uint64_t>(episode_)),
                       static_cast<std::uint64_t>(t_));
}

void Environment::draw_channel() {
    const auto& s = cfg_.system;
    channel_ = phy::ChannelRealization(s.users, s.subchannels, s.antennas);
    channel_.snapshot = t_;
    for (std::size_t u = 0; u < s.users; ++u) {
        phy::LinkBudget b{distances_[u], phy::path_gain_db(distances_[u], s.path_loss) + s.link_gain_db, s.noise_var,
                          s.k_factor};
        for (std::size_t c = 0; c < s.subchannels; ++c) {
            auto h = phy::sample_rician(b, los_phases_[u], env_rng_);
            std::copy(h.begin(), h.end(), channel_.at(u, c).begin());
        }
    }
}

void Environment::draw_items(std::uint64_t stream) {
    items_.assign(users(), {});
    for (std::size_t u = 0; u < users(); ++u) {
        Rng r(rng::derive(rng::derive(stream, static_cast<std::uint64_t>(u)), "items"));
        for (std::size_t k = 0; k < cfg_.items_per_user; ++k) items_[u].push_back(semantic::sample_source(source_, u, r));
    }
}

std::vector<double> Environment::snr(const Action& action) const {
    std::vector<double> out(users());
    const double noise = cfg_.system.noise_var * cfg_.system.noise_factor;
    for (std::size_t u = 0; u < users(); ++u) {
        const std::size_t c = action.subchannel.at(u);
        out[u] = std::norm(phy::beam_gain(channel_.at(u, c), action.beams.at(u, c))) / noise;
    }
    return out;
}

std::vector<semantic::PipelineLink> Environment::links(const Action& action) const {
    std::vector<semantic::PipelineLink> out(users());
    for (std::size_t u = 0; u < users(); ++u) {
        const std::size_t c = action.subchannel.at(u);
        out[u].sbq = {action.n.at(u), p_th_};
        out[u].gain = phy::beam_gain(channel_.at(u, c), action.beams.at(u, c));
        out[u].noise_var = cfg_.system.noise_var * cfg_.system.noise_factor;
        out[u].mode = cfg_.system.transport;
    }
    return out;
}

qos::MetricsSnapshot Environment::transmit(const Action& action, std::uint64_t stream) {
    const auto lk = links(action);
    const std::size_t L = cfg_.source.embedding_len;
    qos::MetricsSnapshot snap;
    for (std::size_t u = 0; u < users(); ++u) {
        Rng r(rng::derive(rng::derive(stream, static_cast<std::uint64_t>(u)), "transport"));
        const auto& items = items_[u];
        ad::Array rx(items.size(), L);
        for (std::size_t k = 0; k < items.size(); ++k) {
            auto got = semantic::transmit_embedding(items[k].values, lk[u], r);
            std::copy(got.values.begin(), got.values.end(), rx.row_span(k).begin());
        }
        const ad::Array e_hat = semantic::compensate(rx, compensator_);
        std::vector<double> sims(items.size());
        for (std::size_t k = 0; k < items.size(); ++k) sims[k] = semantic::similarity_proxy(items[k].values, e_hat.row_span(k));

        const double snr = std::norm(lk[u].gain) / lk[u].noise_var;
        const double rate = phy::transmission_rate(action.bandwidth[u], snr);
        auto um = qos::user_metrics(sims, action.n[u], rate, cfg_.qos);
        um.subchannel = action.subchannel[u];
        um.bandwidth = action.bandwidth[u];
        um.snr = snr;
        snap.users.push_back(um);
    }
    qos::finalize(snap, cfg_.qos);
    if (!std::isfinite(snap.reward)) throw TrainingError("environment: non-finite reward");
    return snap;
}

void Environment::assemble_state(const Action& previous, const qos::MetricsSnapshot& m) {
    const auto& s = cfg_.system;
    const std::size_t U = s.users, C = s.subchannels, M = s.antennas, L = cfg_.source.embedding_len;
    const auto N = static_cast<std::size_t>(s.sbq_levels);
    state_.assign(layout_.dim, 0.0);

    std::copy(previous.raw_continuous.begin(), previous.raw_continuous.end(), state_.begin() + static_cast<std::ptrdiff_t>(layout_.prev_continuous));
    for (std::size_t u = 0; u < U; ++u) {
        state_[layout_.prev_level + u * N + static_cast<std::size_t>(previous.n[u] - 1)] = 1.0;
        state_[layout_.prev_subchannel + u * C + previous.subchannel[u]] = 1.0;
    }

    std::vector<double> mean(L);
    for (std::size_t u = 0; u < U; ++u) {
        std::fill(mean.begin(), mean.end(), 0.0);
        for (const auto& it : items_[u])
            for (std::size_t j = 0; j < L; ++j) mean[j] += it.values[j];
        normalize_into(mean, std::span(state_).subspan(layout_.embeddings + u * L, L));
    }

    std::vector<double> h(2 * C * M);
    for (std::size_t u = 0; u < U; ++u) {
        auto hu = channel_.user(u);
        for (std::size_t i = 0; i < hu.size(); ++i) {
            h[2 * i] = hu[i].real();
            h[2 * i + 1] = hu[i].imag();
        }
        normalize_into(h, std::span(state_).subspan(layout_.channels + u * 2 * C * M, 2 * C * M));
    }

    for (std::size_t u = 0; u < U; ++u) {
        state_[layout_.sqe + u] = m.users[u].sqe;
        state_[layout_.latency + u] = std::min(m.users[u].latency / cfg_.qos.g_th, kLatencyStateCap);
    }
    const double scale = (cfg_.qos.omega_im + cfg_.qos.omega_g) * static_cast<double>(U) * std::max(cfg_.qos.bonus, 1e-12);
    state_[layout_.reward] = (cfg_.cumulative_reward_in_state ? reward_sum_ : m.reward) / scale;
}

std::vector<double> Environment::reset() {
    if (started_) ++episode_;
    started_ = true;
    t_ = 0;
    reward_sum_ = 0.0;
    const auto& s = cfg_.system;

    std::uniform_real_distribution<double> dist(s.distance_min_m, s.distance_max_m);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    distances_.resize(s.users);
    los_phases_.assign(s.users, std::vector<double>(s.antennas));
    for (std::size_t u = 0; u < s.users; ++u) {
        distances_[u] = dist(env_rng_);
        for (auto& p : los_phases_[u]) p = phase(env_rng_);
    }

    // Populate the metric part of the state with one random allocation.
    const std::uint64_t warm = rng::derive(rng::derive(seed_, "warmup"), static_cast<std::uint64_t>(episode_));
    Rng warm_rng(warm);
    const Action a0 = project(random_raw_action(s, warm_rng));
    draw_channel();
    draw_items(warm);
    const auto m0 = transmit(a0, warm);
    last_metrics_ = m0;

    draw_channel();
    draw_items(step_stream());
    assemble_state(a0, m0);
    return state_;
}

StepOutcome Environment::step(const Action& action) {
    if (!started_) throw UsageError("Environment::step called before reset");
    if (t_ >= cfg_.horizon) throw UsageError("Environment::step called after the episode ended");
    StepOutcome out;
    out.metrics = transmit(action, step_stream());
    last_metrics_ = out.metrics;
    out.reward = out.metrics.reward;
    out.constraints = constraint_check(action, out.metrics, cfg_);
    reward_sum_ += out.reward;

    ++t_;
    out.done = t_ >= cfg_.horizon;
    draw_channel();
    draw_items(step_stream());
    assemble_state(action, out.metrics);
    out.next_state = state_;
    if (trace_) trace_(StepTrace{episode_, t_ - 1, layout_.dim, &action, &out});
    return out;
}

semantic::EpochResult Environment::train_compensator(const Action& action, std::size_t batches) {
    semantic::EpochConfig ec{batches, cfg_.items_per_user};
    return semantic::train_compensator_epoch(source_, compensator_, compensator_adam_, links(action), ec,
                                             compensator_rng_);
}

}  // namespace semra::env
