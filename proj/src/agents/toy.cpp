#include "semra/agents/toy.hpp"

#include <cmath>
#include <random>

#include "semra/agents/replay.hpp"
#include "semra/common/errors.hpp"

namespace semra::agents {

namespace {

std::vector<double> noise_state(std::size_t dim, Rng& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> s(dim);
    for (auto& x : s) x = u(rng);
    return s;
}

}  // namespace

ToyRun train_bandit(const std::vector<double>& arm_rewards, std::size_t updates, std::uint64_t seed,
                    const DsacConfig& cfg, std::size_t batch, std::size_t state_dim) {
    if (arm_rewards.size() < 2) throw DomainError("train_bandit: need at least two arms");
    Rng init = rng::make(seed, "agent-init");
    Rng env = rng::make(seed, "toy-env");
    Rng sampling = rng::make(seed, "sampling");
    DsacAgent agent = make_dsac(state_dim, {arm_rewards.size()}, cfg, init);
    ReplayBuffer buffer(20000);
    ToyRun run;
    while (run.updates < updates) {
        auto s = noise_state(state_dim, env);
        const int a = dsac_sample(agent, s, sampling).front();
        buffer.push({s, {}, {a}, arm_rewards[static_cast<std::size_t>(a)], noise_state(state_dim, env), true});
        if (buffer.size() < batch) continue;
        dsac_update(agent, buffer.sample(batch, sampling));
        ++run.updates;
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < arm_rewards.size(); ++k)
        if (arm_rewards[k] > arm_rewards[best]) best = k;
    Rng probe = rng::make(seed, "toy-probe");
    constexpr int kProbes = 1000;
    int hits = 0;
    for (int i = 0; i < kProbes; ++i)
        if (static_cast<std::size_t>(dsac_greedy(agent, noise_state(state_dim, probe)).front()) == best) ++hits;
    run.score = static_cast<double>(hits) / kProbes;
    return run;
}

ToyRun train_quadratic(const std::vector<double>& optimum, std::size_t updates, std::uint64_t seed,
                       const SacConfig& cfg, std::size_t batch, std::size_t state_dim) {
    if (optimum.empty()) throw DomainError("train_quadratic: empty optimum");
    for (double v : optimum)
        if (!(std::abs(v) < 1.0)) throw DomainError("train_quadratic: optimum must lie in (-1, 1)");
    Rng init = rng::make(seed, "agent-init");
    Rng env = rng::make(seed, "toy-env");
    Rng sampling = rng::make(seed, "sampling");
    SacAgent agent = make_sac(state_dim, optimum.size(), cfg, init);
    ReplayBuffer buffer(20000);
    ToyRun run;
    while (run.updates < updates) {
        auto s = noise_state(state_dim, env);
        const auto head = sac_policy(agent, ad::Array::row(s));
        const auto sample = squash_with_noise(head.mean, head.log_std, standard_normal(1, optimum.size(), sampling));
        std::vector<double> a(sample.action.values().begin(), sample.action.values().end());
        double r = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) r -= (a[k] - optimum[k]) * (a[k] - optimum[k]);
        buffer.push({s, a, {}, r, noise_state(state_dim, env), true});
        if (buffer.size() < batch) continue;
        sac_update(agent, buffer.sample(batch, sampling), sampling);
        ++run.updates;
    }
    Rng probe = rng::make(seed, "toy-probe");
    constexpr int kProbes = 200;
    for (int i = 0; i < kProbes; ++i) {
        const auto g = sac_greedy(agent, noise_state(state_dim, probe));
        double d = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) d += (g[k] - optimum[k]) * (g[k] - optimum[k]);
        d = std::sqrt(d);
        run.score += d / kProbes;
        run.worst = std::max(run.worst, d);
    }
    return run;
}

}  // namespace semra::agents
