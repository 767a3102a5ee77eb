#include "semra/agents/trainer.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "semra/agents/replay.hpp"
#include "semra/common/errors.hpp"
#include "semra/phy/link.hpp"

namespace semra::agents {

void TrainerConfig::validate() const {
    if (episodes == 0) throw ConfigError("run.episodes", "must be positive");
    if (batch_size == 0) throw ConfigError("drl.batch_size", "must be positive");
    if (replay_capacity < batch_size) throw ConfigError("drl.replay_capacity", "must be at least the batch size");
    if (target_interval == 0) throw ConfigError("drl.target_interval", "must be positive");
    if (!(reward_scale > 0.0) || !std::isfinite(reward_scale))
        throw ConfigError("drl.reward_scale", "must be positive and finite");
}

namespace {

struct StepStats {
    double reward = 0.0, sc_qos = 0.0, similarity = 0.0, sqe = 0.0, latency = 0.0, n = 0.0;
};

StepStats step_stats(const env::StepOutcome& out, const qos::QosWeights& w) {
    StepStats s;
    s.reward = out.reward;
    s.sc_qos = out.metrics.sc_qos;
    const double k = static_cast<double>(out.metrics.users.size());
    for (const auto& u : out.metrics.users) {
        s.similarity += u.similarity / k;
        s.sqe += u.sqe / k;
        s.latency += qos::capped_latency(u.latency, w) / k;
        s.n += static_cast<double>(u.n) / k;
    }
    return s;
}

}  // namespace

void pretrain_compensator(env::Environment& target, const env::EnvConfig& env_cfg, std::size_t batches,
                          std::uint64_t seed) {
    env::Environment scratch(env_cfg, rng::derive(seed, "compensator-pretrain"));
    scratch.set_compensator(target.compensator());
    Rng rng = rng::make(seed, "compensator-pretrain-actions");
    constexpr std::size_t kPerChannel = 10;
    std::size_t left = batches;
    while (left > 0) {
        scratch.reset();
        const auto action = scratch.project(env::random_raw_action(env_cfg.system, rng));
        const std::size_t b = std::min(left, kPerChannel);
        scratch.train_compensator(action, b);
        left -= b;
    }
    target.set_compensator(scratch.compensator());
}

TrainResult train(const env::EnvConfig& env_cfg, const SacConfig& sac_cfg, const DsacConfig& dsac_cfg,
                  const TrainerConfig& cfg, std::uint64_t seed,
                  const std::function<void(env::Environment&)>& on_env) {
    env_cfg.validate();
    cfg.validate();
    env::Environment environment(env_cfg, rng::derive(seed, "train-env"));
    if (on_env) on_env(environment);
    Rng init = rng::make(seed, "agent-init");
    Rng sampling = rng::make(seed, "sampling");
    Rng split_sampling = rng::make(seed, "sampling-dsac");

    const std::size_t U = environment.users();
    const std::size_t N = static_cast<std::size_t>(environment.levels());
    const std::size_t C = environment.subchannels();
    TrainResult result{{make_sac(environment.state_dim(), environment.continuous_dim(), sac_cfg, init),
                        make_dsac(environment.state_dim(), hybrid_heads(U, N, C), dsac_cfg, init), {}},
                       {},
                       0};
    auto& sac = result.policy.sac;
    auto& dsac = result.policy.dsac;
    if (cfg.freeze_compensator) pretrain_compensator(environment, env_cfg, cfg.pretrain_compensator_batches, seed);

    ReplayBuffer buffer(cfg.replay_capacity);
    std::size_t total_steps = 0;
    UpdateStats last_sac, last_dsac;

    for (std::size_t ep = 0; ep < cfg.episodes; ++ep) {
        std::vector<double> state = environment.reset();
        EpisodeLog log;
        log.episode = ep;
        std::size_t steps = 0, ep_updates = 0;
        double comp_loss = 0.0;
        bool done = false;
        while (!done) {
            HybridDecision d;
            if (total_steps < cfg.random_steps) {
                const auto raw = env::random_raw_action(env_cfg.system, sampling);
                d.continuous = raw.continuous;
                d.discrete = raw.level;
                d.discrete.insert(d.discrete.end(), raw.subchannel.begin(), raw.subchannel.end());
                d.head_probs.assign(U * (N + C), 0.0);
                for (std::size_t u = 0; u < U; ++u)
                    d.head_probs[U * N + u * C + static_cast<std::size_t>(raw.subchannel[u])] = 1.0;
            } else {
                d = act_hybrid(state, sac, dsac, true, sampling);
            }
            const env::Action action = environment.project(to_raw_action(d, U, N, C));
            if (!cfg.freeze_compensator && cfg.compensator_batches > 0)
                comp_loss += environment.train_compensator(action, cfg.compensator_batches).mean_loss;
            const auto out = environment.step(action);
            done = out.done;
            buffer.push({state, d.continuous, d.discrete, out.reward * cfg.reward_scale, out.next_state, false});
            state = out.next_state;
            ++total_steps;
            ++steps;

            const auto s = step_stats(out, env_cfg.qos);
            log.mean_reward += s.reward;
            log.mean_sc_qos += s.sc_qos;
            log.mean_similarity += s.similarity;
            log.mean_sqe += s.sqe;
            log.mean_latency += s.latency;
            log.mean_n += s.n;

            if (buffer.size() < cfg.batch_size) continue;
            for (std::size_t k = 0; k < cfg.updates_per_step; ++k) {
                try {
                    const Batch batch = buffer.sample(cfg.batch_size, sampling);
                    last_sac = sac_update(sac, batch, sampling);
                    last_dsac = cfg.shared_replay ? dsac_update(dsac, batch)
                                                  : dsac_update(dsac, buffer.sample(cfg.batch_size, split_sampling));
                } catch (const TrainingError& e) {
                    std::ostringstream msg;
                    msg << e.what() << " at episode " << ep << " step " << steps << " update " << result.updates
                        << "; last SAC critic/actor loss " << last_sac.critic_loss << "/" << last_sac.actor_loss
                        << ", alpha " << last_sac.alpha << "; last D-SAC critic/actor loss " << last_dsac.critic_loss
                        << "/" << last_dsac.actor_loss << ", alpha " << last_dsac.alpha;
                    throw TrainingError(msg.str());
                }
                ++result.updates;
                ++ep_updates;
                if (cfg.target_interval > 1 && result.updates % cfg.target_interval == 0) {
                    sac.target1 = sac.critic1.params;
                    sac.target2 = sac.critic2.params;
                    dsac.target1 = dsac.critic1.params;
                    dsac.target2 = dsac.critic2.params;
                }
                log.sac_critic_loss += last_sac.critic_loss;
                log.sac_actor_loss += last_sac.actor_loss;
                log.dsac_critic_loss += last_dsac.critic_loss;
                log.dsac_actor_loss += last_dsac.actor_loss;
            }
        }
        const double k = static_cast<double>(steps);
        log.mean_reward /= k;
        log.mean_sc_qos /= k;
        log.mean_similarity /= k;
        log.mean_sqe /= k;
        log.mean_latency /= k;
        log.mean_n /= k;
        log.compensator_loss = comp_loss / k;
        if (ep_updates > 0) {
            const double u = static_cast<double>(ep_updates);
            log.sac_critic_loss /= u;
            log.sac_actor_loss /= u;
            log.dsac_critic_loss /= u;
            log.dsac_actor_loss /= u;
        }
        log.sac_alpha = sac.temperature.alpha();
        log.dsac_alpha = dsac.temperature.alpha();
        log.updates = ep_updates;
        result.episodes.push_back(log);
    }
    result.policy.compensator = environment.compensator();
    return result;
}

EvalResult evaluate_policy(const env::EnvConfig& env_cfg, std::uint64_t seed,
                           const semantic::CompensatorParams& compensator, const Policy& policy, std::size_t episodes,
                           std::size_t steps, const StepSink& on_step) {
    if (episodes == 0 || steps == 0) throw ConfigError("run.eval_episodes", "evaluation needs at least one step");
    env::EnvConfig cfg = env_cfg;
    cfg.horizon = std::max(cfg.horizon, steps);
    env::Environment environment(cfg, seed);
    environment.set_compensator(compensator);
    EvalResult r;
    for (std::size_t ep = 0; ep < episodes; ++ep) {
        auto state = environment.reset();
        for (std::size_t t = 0; t < steps; ++t) {
            const auto action = policy(state, environment);
            const auto out = environment.step(action);
            if (on_step) on_step(ep, t, action, out);
            const auto s = step_stats(out, cfg.qos);
            r.step_sc_qos.push_back(s.sc_qos);
            r.mean_sc_qos += s.sc_qos;
            r.mean_reward += s.reward;
            r.mean_similarity += s.similarity;
            r.mean_sqe += s.sqe;
            r.mean_latency += s.latency;
            r.mean_n += s.n;
            state = out.next_state;
        }
    }
    const double k = static_cast<double>(episodes * steps);
    r.mean_sc_qos /= k;
    r.mean_reward /= k;
    r.mean_similarity /= k;
    r.mean_sqe /= k;
    r.mean_latency /= k;
    r.mean_n /= k;
    return r;
}

Policy greedy_policy(const TrainedPolicy& p) {
    return [&p](const std::vector<double>& state, const env::Environment& e) {
        Rng unused(0);
        const auto d = act_hybrid(state, p.sac, p.dsac, false, unused);
        return e.project(to_raw_action(d, e.users(), static_cast<std::size_t>(e.levels()), e.subchannels()));
    };
}

Policy random_policy(std::uint64_t seed) {
    auto rng = std::make_shared<Rng>(rng::make(seed, "random-policy"));
    return [rng](const std::vector<double>&, const env::Environment& e) {
        return e.project(env::random_raw_action(e.config().system, *rng));
    };
}

Policy rate_only_policy(const TrainedPolicy& p, std::uint64_t seed) {
    auto rng = std::make_shared<Rng>(rng::make(seed, "rate-only-policy"));
    return [&p, rng](const std::vector<double>& state, const env::Environment& e) {
        Rng unused(0);
        auto d = act_hybrid(state, p.sac, p.dsac, false, unused);
        std::uniform_int_distribution<int> level(0, e.levels() - 1);
        for (std::size_t u = 0; u < e.users(); ++u) d.discrete[u] = level(*rng);
        return e.project(to_raw_action(d, e.users(), static_cast<std::size_t>(e.levels()), e.subchannels()));
    };
}

Policy fixed_policy(int n) {
    return [n](const std::vector<double>&, const env::Environment& e) {
        const auto& sys = e.config().system;
        const std::size_t U = e.users();
        if (n < 1 || n > e.levels()) throw ConfigError("system.sbq_levels", "fixed level out of range");
        env::Action a;
        a.n.assign(U, n);
        a.raw_continuous.assign(e.continuous_dim(), 0.0);
        a.bandwidth = env::allocate_bandwidth(std::vector<double>(U, 0.0), sys.bandwidth_hz);
        a.beams = phy::Beamformer(U, sys.subchannels, sys.antennas);
        const double per_user = sys.tx_power_w() / static_cast<double>(U);
        for (std::size_t u = 0; u < U; ++u) {
            a.subchannel.push_back(u);
            const auto h = e.channel().at(u, u);
            double norm = 0.0;
            for (const auto& x : h) norm += std::norm(x);
            auto f = a.beams.at(u, u);
            for (std::size_t m = 0; m < h.size(); ++m)
                f[m] = norm > 0.0 ? std::conj(h[m]) * std::sqrt(per_user / norm) : phy::cd{};
        }
        env::project_power(a.beams, sys.tx_power_w());
        return a;
    };
}

long MappingTable::bucket(double snr_linear) const {
    const double db = snr_linear > 0.0 ? phy::linear_to_db(snr_linear) : -400.0;
    return static_cast<long>(std::floor(db / bucket_db));
}

void MappingTable::record(double snr_linear, int n, double gated_similarity) {
    if (n < 1 || n > levels) throw DomainError("MappingTable::record: level out of range");
    const long b = bucket(snr_linear);
    auto& s = sum[b];
    auto& c = count[b];
    if (s.empty()) {
        s.assign(static_cast<std::size_t>(levels), 0.0);
        c.assign(static_cast<std::size_t>(levels), 0.0);
    }
    s[static_cast<std::size_t>(n - 1)] += gated_similarity;
    c[static_cast<std::size_t>(n - 1)] += 1.0;
}

std::optional<double> MappingTable::predict(double snr_linear, int n) const {
    if (n < 1 || n > levels) throw DomainError("MappingTable::predict: level out of range");
    const long b = bucket(snr_linear);
    const auto idx = static_cast<std::size_t>(n - 1);
    std::optional<double> best;
    long best_dist = std::numeric_limits<long>::max();
    for (const auto& [key, c] : count) {
        if (c[idx] <= 0.0) continue;
        const long dist = std::abs(key - b);
        if (dist < best_dist) {
            best_dist = dist;
            best = sum.at(key)[idx] / c[idx];
        }
    }
    return best;
}

MappingTable calibrate_mapping(const env::EnvConfig& env_cfg, const TrainedPolicy& p, double bucket_db,
                               std::uint64_t seed, std::size_t episodes, std::size_t steps) {
    if (!(bucket_db > 0.0)) throw ConfigError("run.bucket_db", "bucket width must be positive");
    MappingTable table;
    table.bucket_db = bucket_db;
    table.levels = env_cfg.system.sbq_levels;
    env::EnvConfig cfg = env_cfg;
    cfg.horizon = std::max(cfg.horizon, steps);
    env::Environment environment(cfg, rng::derive(seed, "calibration-env"));
    environment.set_compensator(p.compensator);
    const Policy explore = rate_only_policy(p, rng::derive(seed, "calibration-levels"));
    for (std::size_t ep = 0; ep < episodes; ++ep) {
        auto state = environment.reset();
        for (std::size_t t = 0; t < steps; ++t) {
            const env::Action a = explore(state, environment);
            const auto snr = environment.snr(a);
            const auto out = environment.step(a);
            for (std::size_t u = 0; u < out.metrics.users.size(); ++u) {
                const auto& m = out.metrics.users[u];
                table.record(snr[u], m.n, m.effective_sqe * m.n);
            }
            state = out.next_state;
        }
    }
    return table;
}

Policy mapping_guided_policy(const TrainedPolicy& p, const MappingTable& table, SnrSource source) {
    if (table.count.empty()) throw ConfigError("run.bucket_db", "mapping-guided policy needs a calibration table");
    return [&p, &table, source](const std::vector<double>& state, const env::Environment& e) {
        Rng unused(0);
        auto d = act_hybrid(state, p.sac, p.dsac, false, unused);
        const std::size_t U = e.users();
        const auto N = static_cast<std::size_t>(e.levels());
        env::Action a = e.project(to_raw_action(d, U, N, e.subchannels()));
        std::vector<double> snr;
        if (source == SnrSource::Current) {
            snr = e.snr(a);
        } else {
            for (const auto& m : e.last_metrics().users) snr.push_back(m.snr);
        }
        const auto& w = e.config().qos;
        for (std::size_t u = 0; u < U; ++u) {
            const double rate = phy::transmission_rate(a.bandwidth[u], snr[u]);
            double best = -std::numeric_limits<double>::infinity();
            int pick = 1;
            for (int n = 1; n <= e.levels(); ++n) {
                const auto sim = table.predict(snr[u], n);
                if (!sim) continue;
                const double lat = qos::capped_latency(qos::latency(n, rate, w.latency_scale), w);
                const double score = *sim / n - w.phi_g * lat;
                if (score > best) {
                    best = score;
                    pick = n;
                }
            }
            a.n[u] = pick;
        }
        return a;
    };
}

}  // namespace semra::agents
