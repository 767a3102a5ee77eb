#include "semra/agents/dsac.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "semra/common/errors.hpp"

namespace semra::agents {

namespace {

std::vector<std::size_t> layer_sizes(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out) {
    std::vector<std::size_t> s{in};
    s.insert(s.end(), hidden.begin(), hidden.end());
    s.push_back(out);
    return s;
}

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw TrainingError(std::string("non-finite ") + what);
}

ad::Array one_hot(const Batch& batch, std::size_t head, std::size_t k) {
    ad::Array m(batch.size(), k);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (head >= batch.discrete[i].size()) throw DimensionError("dsac: transition lacks a discrete choice");
        const int c = batch.discrete[i][head];
        if (c < 0 || static_cast<std::size_t>(c) >= k) throw DomainError("dsac: discrete choice out of range");
        m(i, static_cast<std::size_t>(c)) = 1.0;
    }
    return m;
}

}  // namespace

void DsacConfig::validate() const {
    if (hidden.empty()) throw ConfigError("drl.hidden", "at least one hidden layer required");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("drl.gamma", "must lie in [0, 1)");
    if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("drl.tau", "must lie in [0, 1]");
    if (!(optimizer.learning_rate > 0.0)) throw ConfigError("drl.learning_rate", "must be positive");
    if (!(init_alpha > 0.0)) throw ConfigError("drl.init_alpha", "must be positive");
}

DsacAgent make_dsac(std::size_t state_dim, std::vector<std::size_t> heads, const DsacConfig& cfg, Rng& rng) {
    cfg.validate();
    if (state_dim == 0 || heads.empty()) throw DimensionError("make_dsac: dimensions must be positive");
    DsacAgent a;
    a.cfg = cfg;
    a.state_dim = state_dim;
    std::size_t off = 0;
    for (auto k : heads) {
        if (k < 2) throw DimensionError("make_dsac: every head needs at least two choices");
        a.offsets.push_back(off);
        off += k;
    }
    a.heads = std::move(heads);
    const auto sizes = layer_sizes(state_dim, cfg.hidden, off);
    a.actor = make_trainable(sizes, ad::Activation::Linear, cfg.optimizer, rng);
    a.critic1 = make_trainable(sizes, ad::Activation::Linear, cfg.optimizer, rng);
    a.critic2 = make_trainable(sizes, ad::Activation::Linear, cfg.optimizer, rng);
    a.target1 = a.critic1.params;
    a.target2 = a.critic2.params;
    ad::AdamConfig ac = cfg.optimizer;
    ac.learning_rate = cfg.alpha_lr;
    a.temperature = make_temperature(cfg.init_alpha, ac);
    return a;
}

CategoricalHeads categorical_from_logits(const ad::Array& logits, const std::vector<std::size_t>& heads) {
    CategoricalHeads out;
    std::size_t off = 0;
    for (auto k : heads) {
        ad::Array p(logits.rows(), k), lp(logits.rows(), k);
        for (std::size_t i = 0; i < logits.rows(); ++i) {
            double mx = logits(i, off);
            for (std::size_t c = 1; c < k; ++c) mx = std::max(mx, logits(i, off + c));
            double z = 0.0;
            for (std::size_t c = 0; c < k; ++c) z += std::exp(logits(i, off + c) - mx);
            const double lz = std::log(z);
            for (std::size_t c = 0; c < k; ++c) {
                lp(i, c) = logits(i, off + c) - mx - lz;
                p(i, c) = std::exp(lp(i, c));
            }
        }
        out.probs.push_back(std::move(p));
        out.log_probs.push_back(std::move(lp));
        off += k;
    }
    if (off != logits.cols()) throw DimensionError("categorical_from_logits: head sizes do not cover the logits");
    return out;
}

CategoricalHeads dsac_policy(const DsacAgent& agent, const ad::Array& states) {
    return categorical_from_logits(ad::evaluate(agent.actor.params, states), agent.heads);
}

LossResult dsac_actor_loss(const DsacAgent& agent, const ad::Array& states) {
    if (states.rows() == 0) throw DomainError("dsac_actor_loss: empty batch");
    const ad::Array q1 = ad::evaluate(agent.critic1.params, states);
    const ad::Array q2 = ad::evaluate(agent.critic2.params, states);
    ad::Array neg_q(q1.rows(), q1.cols());
    for (std::size_t k = 0; k < neg_q.size(); ++k) neg_q[k] = -std::min(q1[k], q2[k]);
    const double alpha = agent.temperature.alpha();

    ad::Tape tape;
    auto actor = ad::bind(tape, agent.actor.params, true);
    ad::Var logits = ad::forward(agent.actor.params, actor, tape.constant(states));
    ad::Var nq = tape.constant(neg_q);
    ad::Var total{};
    for (std::size_t h = 0; h < agent.heads.size(); ++h) {
        ad::Var z = ad::slice(logits, agent.offsets[h], agent.heads[h]);
        ad::Var p = ad::softmax(z);
        ad::Var lp = ad::log_softmax(z);
        ad::Var inner = ad::slice(nq, agent.offsets[h], agent.heads[h]) + ad::scale(lp, alpha);
        ad::Var term = ad::mean(ad::sum_rows(p * inner));
        total = total.valid() ? total + term : term;
    }
    tape.backward(total);
    return {tape.value(total).item(), {ad::gradients(tape, actor)}, 0.0};
}

std::vector<ad::Array> dsac_targets(const DsacAgent& agent, const Batch& batch, double gamma) {
    const auto pol = dsac_policy(agent, batch.next_states);
    const ad::Array q1 = ad::evaluate(agent.target1, batch.next_states);
    const ad::Array q2 = ad::evaluate(agent.target2, batch.next_states);
    const double alpha = agent.temperature.alpha();
    std::vector<ad::Array> ys;
    for (std::size_t h = 0; h < agent.heads.size(); ++h) {
        ad::Array y(batch.size(), 1);
        for (std::size_t i = 0; i < batch.size(); ++i) {
            double v = 0.0;
            for (std::size_t c = 0; c < agent.heads[h]; ++c) {
                const std::size_t col = agent.offsets[h] + c;
                const double q = std::min(q1(i, col), q2(i, col));
                v += pol.probs[h](i, c) * (q - alpha * pol.log_probs[h](i, c));
            }
            y(i, 0) = batch.rewards(i, 0) + gamma * batch.not_done(i, 0) * v;
        }
        ys.push_back(std::move(y));
    }
    return ys;
}

LossResult dsac_critic_loss(const DsacAgent& agent, const Batch& batch, double gamma) {
    if (batch.size() == 0) throw DomainError("dsac_critic_loss: empty batch");
    const auto ys = dsac_targets(agent, batch, gamma);
    ad::Tape tape;
    auto c1 = ad::bind(tape, agent.critic1.params, true);
    auto c2 = ad::bind(tape, agent.critic2.params, true);
    ad::Var s = tape.constant(batch.states);
    ad::Var q1 = ad::forward(agent.critic1.params, c1, s);
    ad::Var q2 = ad::forward(agent.critic2.params, c2, s);
    ad::Var total{};
    for (std::size_t h = 0; h < agent.heads.size(); ++h) {
        ad::Var mask = tape.constant(one_hot(batch, h, agent.heads[h]));
        ad::Var y = tape.constant(ys[h]);
        for (ad::Var q : {q1, q2}) {
            ad::Var taken = ad::sum_rows(ad::slice(q, agent.offsets[h], agent.heads[h]) * mask);
            ad::Var term = ad::mean(ad::square(taken - y));
            total = total.valid() ? total + term : term;
        }
    }
    ad::Var loss = ad::scale(total, 1.0 / static_cast<double>(2 * agent.heads.size()));
    tape.backward(loss);
    return {tape.value(loss).item(), {ad::gradients(tape, c1), ad::gradients(tape, c2)}, 0.0};
}

LossResult dsac_temperature_loss(const DsacAgent& agent, const ad::Array& states) {
    if (states.rows() == 0) throw DomainError("dsac_temperature_loss: empty batch");
    const auto pol = dsac_policy(agent, states);
    // Mean head entropy summed over heads; the policy is held fixed here.
    double entropy = 0.0;
    for (std::size_t h = 0; h < agent.heads.size(); ++h) {
        double e = 0.0;
        for (std::size_t k = 0; k < pol.probs[h].size(); ++k) e -= pol.probs[h][k] * pol.log_probs[h][k];
        entropy += e / static_cast<double>(states.rows());
    }
    const double heads = static_cast<double>(agent.heads.size());
    const double target = agent.cfg.target_entropy;
    ad::Tape tape;
    ad::Var la = tape.leaf(agent.temperature.log_alpha);
    ad::Var alpha = ad::exp(la);
    ad::Var loss{};
    if (agent.cfg.temperature_form == TemperatureForm::Literal) {
        loss = ad::add_scalar(ad::scale(alpha, entropy), heads * target);
    } else {
        loss = ad::scale(alpha, entropy + heads * target);
    }
    tape.backward(loss);
    return {tape.value(loss).item(), {}, tape.grad(la).item()};
}

UpdateStats dsac_update(DsacAgent& agent, const Batch& batch) {
    UpdateStats st;
    const auto critic = dsac_critic_loss(agent, batch, agent.cfg.gamma);
    check_finite(critic.value, "D-SAC critic loss");
    apply_gradients(agent.critic1, critic.grads[0], "dsac.critic1");
    apply_gradients(agent.critic2, critic.grads[1], "dsac.critic2");
    st.critic_loss = critic.value;

    const auto actor = dsac_actor_loss(agent, batch.states);
    check_finite(actor.value, "D-SAC actor loss");
    apply_gradients(agent.actor, actor.grads[0], "dsac.actor");
    st.actor_loss = actor.value;

    if (agent.cfg.learn_alpha) {
        const auto temp = dsac_temperature_loss(agent, batch.states);
        check_finite(temp.value, "D-SAC temperature loss");
        temperature_step(agent.temperature, temp.grad_log_alpha);
        st.temperature_loss = temp.value;
    }
    st.alpha = agent.temperature.alpha();

    soft_update(agent.critic1.params, agent.target1, agent.cfg.tau);
    soft_update(agent.critic2.params, agent.target2, agent.cfg.tau);
    return st;
}

std::vector<int> dsac_greedy(const DsacAgent& agent, const std::vector<double>& state) {
    if (state.size() != agent.state_dim) throw DimensionError("dsac_greedy: state width mismatch");
    const ad::Array logits = ad::evaluate(agent.actor.params, ad::Array::row(state));
    std::vector<int> out;
    for (std::size_t h = 0; h < agent.heads.size(); ++h) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < agent.heads[h]; ++c)
            if (logits(0, agent.offsets[h] + c) > logits(0, agent.offsets[h] + best)) best = c;
        out.push_back(static_cast<int>(best));
    }
    return out;
}

std::vector<int> dsac_sample(const DsacAgent& agent, const std::vector<double>& state, Rng& rng) {
    if (state.size() != agent.state_dim) throw DimensionError("dsac_sample: state width mismatch");
    const auto pol = dsac_policy(agent, ad::Array::row(state));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<int> out;
    for (const auto& p : pol.probs) {
        const double r = u(rng);
        double acc = 0.0;
        std::size_t pick = p.cols() - 1;
        for (std::size_t c = 0; c < p.cols(); ++c) {
            acc += p(0, c);
            if (r < acc) {
                pick = c;
                break;
            }
        }
        out.push_back(static_cast<int>(pick));
    }
    return out;
}

}  // namespace semra::agents
