#include "semra/agents/hybrid.hpp"

#include "semra/common/errors.hpp"

namespace semra::agents {

HybridDecision act_hybrid(const std::vector<double>& state, const SacAgent& sac, const DsacAgent& dsac, bool explore,
                          Rng& rng) {
    if (state.size() != sac.state_dim || state.size() != dsac.state_dim)
        throw DimensionError("act_hybrid: state width mismatch");
    const ad::Array s = ad::Array::row(state);
    HybridDecision d;
    const auto head = sac_policy(sac, s);
    if (explore) {
        const auto sample = squash_with_noise(head.mean, head.log_std, standard_normal(1, sac.action_dim, rng));
        d.continuous.assign(sample.action.values().begin(), sample.action.values().end());
        d.discrete = dsac_sample(dsac, state, rng);
    } else {
        d.continuous.resize(sac.action_dim);
        for (std::size_t k = 0; k < sac.action_dim; ++k) d.continuous[k] = std::tanh(head.mean(0, k));
        d.discrete = dsac_greedy(dsac, state);
    }
    const auto pol = dsac_policy(dsac, s);
    for (const auto& p : pol.probs) d.head_probs.insert(d.head_probs.end(), p.values().begin(), p.values().end());
    return d;
}

std::vector<std::size_t> hybrid_heads(std::size_t users, std::size_t levels, std::size_t subchannels) {
    std::vector<std::size_t> h(users, levels);
    h.insert(h.end(), users, subchannels);
    return h;
}

env::RawAction to_raw_action(const HybridDecision& d, std::size_t users, std::size_t levels, std::size_t subchannels) {
    if (d.discrete.size() != 2 * users) throw DimensionError("to_raw_action: expected 2U discrete choices");
    if (d.head_probs.size() != users * (levels + subchannels))
        throw DimensionError("to_raw_action: head probabilities do not match the layout");
    env::RawAction raw;
    raw.continuous = d.continuous;
    raw.level.assign(d.discrete.begin(), d.discrete.begin() + static_cast<std::ptrdiff_t>(users));
    raw.subchannel.assign(d.discrete.begin() + static_cast<std::ptrdiff_t>(users), d.discrete.end());
    const auto first = d.head_probs.begin() + static_cast<std::ptrdiff_t>(users * levels);
    raw.subchannel_probs.assign(first, d.head_probs.end());
    return raw;
}

}  // namespace semra::agents
