#include "semra/agents/sac.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "semra/common/errors.hpp"

namespace semra::agents {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727;

std::vector<std::size_t> layer_sizes(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out) {
    std::vector<std::size_t> s{in};
    s.insert(s.end(), hidden.begin(), hidden.end());
    s.push_back(out);
    return s;
}

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw TrainingError(std::string("non-finite ") + what);
}

struct TapePolicy {
    ad::Var action;
    ad::Var log_prob;  // Z x 1
};

TapePolicy tape_policy(ad::Var out, std::size_t action_dim, const ad::Array& noise) {
    ad::Tape& tape = *out.tape;
    const std::size_t z = noise.rows();
    ad::Array base(z, action_dim);
    for (std::size_t k = 0; k < base.size(); ++k) base[k] = -0.5 * noise[k] * noise[k] - kHalfLog2Pi;
    ad::Var mean = ad::slice(out, 0, action_dim);
    ad::Var log_std = ad::clamp(ad::slice(out, action_dim, action_dim), kLogStdMin, kLogStdMax);
    ad::Var pre = mean + ad::exp(log_std) * tape.constant(noise);
    ad::Var a = ad::tanh(pre);
    ad::Var gauss = ad::sum_rows(tape.constant(std::move(base)) - log_std);
    ad::Var jac = ad::sum_rows(ad::log(ad::add_scalar(ad::scale(ad::square(a), -1.0), 1.0 + kSquashEps)));
    return {a, gauss - jac};
}

}  // namespace

void SacConfig::validate() const {
    if (hidden.empty()) throw ConfigError("drl.hidden", "at least one hidden layer required");
    for (auto h : hidden)
        if (h == 0) throw ConfigError("drl.hidden", "layer widths must be positive");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("drl.gamma", "must lie in [0, 1)");
    if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("drl.tau", "must lie in [0, 1]");
    if (!(optimizer.learning_rate > 0.0)) throw ConfigError("drl.learning_rate", "must be positive");
    if (!(alpha_lr >= 0.0)) throw ConfigError("drl.alpha_lr", "must be non-negative");
    if (!(init_alpha > 0.0)) throw ConfigError("drl.init_alpha", "must be positive");
}

SacAgent make_sac(std::size_t state_dim, std::size_t action_dim, const SacConfig& cfg, Rng& rng) {
    cfg.validate();
    if (state_dim == 0 || action_dim == 0) throw DimensionError("make_sac: dimensions must be positive");
    SacAgent a;
    a.cfg = cfg;
    a.state_dim = state_dim;
    a.action_dim = action_dim;
    a.actor = make_trainable(layer_sizes(state_dim, cfg.hidden, 2 * action_dim), ad::Activation::Linear,
                             cfg.optimizer, rng);
    const auto critic_sizes = layer_sizes(state_dim + action_dim, cfg.hidden, 1);
    a.critic1 = make_trainable(critic_sizes, ad::Activation::Linear, cfg.optimizer, rng);
    a.critic2 = make_trainable(critic_sizes, ad::Activation::Linear, cfg.optimizer, rng);
    a.target1 = a.critic1.params;
    a.target2 = a.critic2.params;
    ad::AdamConfig ac = cfg.optimizer;
    ac.learning_rate = cfg.alpha_lr;
    a.temperature = make_temperature(cfg.init_alpha, ac);
    return a;
}

GaussianHead sac_policy(const SacAgent& agent, const ad::Array& states) {
    const ad::Array out = ad::evaluate(agent.actor.params, states);
    const std::size_t z = out.rows();
    const std::size_t d = agent.action_dim;
    GaussianHead h{ad::Array(z, d), ad::Array(z, d)};
    for (std::size_t i = 0; i < z; ++i)
        for (std::size_t k = 0; k < d; ++k) {
            h.mean(i, k) = out(i, k);
            h.log_std(i, k) = std::clamp(out(i, d + k), kLogStdMin, kLogStdMax);
        }
    return h;
}

SquashedSample squash_with_noise(const ad::Array& mean, const ad::Array& log_std, const ad::Array& noise) {
    if (!mean.same_shape(log_std) || !mean.same_shape(noise)) throw DimensionError("squash: shape mismatch");
    SquashedSample s{ad::Array(mean.rows(), mean.cols()), noise, ad::Array(mean.rows(), 1)};
    for (std::size_t i = 0; i < mean.rows(); ++i) {
        double lp = 0.0;
        for (std::size_t k = 0; k < mean.cols(); ++k) {
            const double xi = noise(i, k);
            const double a = std::tanh(mean(i, k) + std::exp(log_std(i, k)) * xi);
            s.action(i, k) = a;
            lp += -0.5 * xi * xi - log_std(i, k) - kHalfLog2Pi;
            lp -= std::log(std::max(1.0 - a * a + kSquashEps, ad::kLogFloor));
        }
        s.log_prob(i, 0) = lp;
    }
    return s;
}

ad::Array standard_normal(std::size_t rows, std::size_t cols, Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    ad::Array a(rows, cols);
    for (auto& v : a.values()) v = n(rng);
    return a;
}

SquashedSample squashed_sample(const ad::Array& mean, const ad::Array& std_dev, Rng& rng) {
    if (!mean.same_shape(std_dev)) throw DimensionError("squashed_sample: shape mismatch");
    ad::Array log_std(std_dev.rows(), std_dev.cols());
    for (std::size_t k = 0; k < std_dev.size(); ++k) {
        if (!(std_dev[k] > 0.0)) throw DomainError("squashed_sample: standard deviation must be positive");
        log_std[k] = std::log(std_dev[k]);
    }
    return squash_with_noise(mean, log_std, standard_normal(mean.rows(), mean.cols(), rng));
}

namespace {

ad::Array join_columns(const ad::Array& a, const ad::Array& b) {
    ad::Array out(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto o = out.row_span(i);
        std::copy(a.row_span(i).begin(), a.row_span(i).end(), o.begin());
        std::copy(b.row_span(i).begin(), b.row_span(i).end(), o.begin() + static_cast<std::ptrdiff_t>(a.cols()));
    }
    return out;
}

}  // namespace

ad::Array critic_value(const ad::MlpParams& critic, const ad::Array& states, const ad::Array& actions) {
    if (states.rows() != actions.rows()) throw DimensionError("critic_value: row mismatch");
    return ad::evaluate(critic, join_columns(states, actions));
}

LossResult sac_actor_loss(const SacAgent& agent, const ad::Array& states, const ad::Array& noise) {
    if (states.rows() == 0) throw DomainError("sac_actor_loss: empty batch");
    if (noise.rows() != states.rows() || noise.cols() != agent.action_dim)
        throw DimensionError("sac_actor_loss: noise shape mismatch");
    ad::Tape tape;
    auto actor = ad::bind(tape, agent.actor.params, true);
    auto c1 = ad::bind(tape, agent.critic1.params, false);
    auto c2 = ad::bind(tape, agent.critic2.params, false);
    ad::Var s = tape.constant(states);
    auto pol = tape_policy(ad::forward(agent.actor.params, actor, s), agent.action_dim, noise);
    ad::Var sa = ad::concat(s, pol.action);
    ad::Var q = ad::minimum(ad::forward(agent.critic1.params, c1, sa), ad::forward(agent.critic2.params, c2, sa));
    ad::Var loss = ad::mean(ad::scale(pol.log_prob, agent.temperature.alpha()) - q);
    tape.backward(loss);
    return {tape.value(loss).item(), {ad::gradients(tape, actor)}, 0.0};
}

ad::Array sac_targets(const SacAgent& agent, const Batch& batch, const ad::Array& next_noise, double gamma) {
    const auto head = sac_policy(agent, batch.next_states);
    const auto next = squash_with_noise(head.mean, head.log_std, next_noise);
    const ad::Array q1 = critic_value(agent.target1, batch.next_states, next.action);
    const ad::Array q2 = critic_value(agent.target2, batch.next_states, next.action);
    const double alpha = agent.temperature.alpha();
    ad::Array y(batch.size(), 1);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const double soft = std::min(q1(i, 0), q2(i, 0)) - alpha * next.log_prob(i, 0);
        y(i, 0) = batch.rewards(i, 0) + gamma * batch.not_done(i, 0) * soft;
    }
    return y;
}

LossResult sac_critic_loss(const SacAgent& agent, const Batch& batch, const ad::Array& next_noise, double gamma) {
    if (batch.size() == 0) throw DomainError("sac_critic_loss: empty batch");
    if (batch.continuous.cols() != agent.action_dim) throw DimensionError("sac_critic_loss: action width mismatch");
    const ad::Array y = sac_targets(agent, batch, next_noise, gamma);
    ad::Tape tape;
    auto c1 = ad::bind(tape, agent.critic1.params, true);
    auto c2 = ad::bind(tape, agent.critic2.params, true);
    ad::Var sa = tape.constant(join_columns(batch.states, batch.continuous));
    ad::Var yv = tape.constant(y);
    ad::Var l1 = ad::mean(ad::square(ad::forward(agent.critic1.params, c1, sa) - yv));
    ad::Var l2 = ad::mean(ad::square(ad::forward(agent.critic2.params, c2, sa) - yv));
    ad::Var loss = ad::scale(l1 + l2, 0.5);
    tape.backward(loss);
    return {tape.value(loss).item(), {ad::gradients(tape, c1), ad::gradients(tape, c2)}, 0.0};
}

LossResult sac_temperature_loss(const SacAgent& agent, const ad::Array& states, const ad::Array& noise) {
    if (states.rows() == 0) throw DomainError("sac_temperature_loss: empty batch");
    const auto head = sac_policy(agent, states);
    const auto sample = squash_with_noise(head.mean, head.log_std, noise);
    ad::Array shifted = sample.log_prob;
    for (auto& v : shifted.values()) v += agent.cfg.target_entropy;
    ad::Tape tape;
    ad::Var la = tape.leaf(agent.temperature.log_alpha);
    ad::Var loss = ad::scale(ad::mean(ad::exp(la) * tape.constant(shifted)), -1.0);
    tape.backward(loss);
    return {tape.value(loss).item(), {}, tape.grad(la).item()};
}

UpdateStats sac_update(SacAgent& agent, const Batch& batch, Rng& rng) {
    UpdateStats st;
    const auto critic = sac_critic_loss(agent, batch, standard_normal(batch.size(), agent.action_dim, rng),
                                        agent.cfg.gamma);
    check_finite(critic.value, "SAC critic loss");
    apply_gradients(agent.critic1, critic.grads[0], "sac.critic1");
    apply_gradients(agent.critic2, critic.grads[1], "sac.critic2");
    st.critic_loss = critic.value;

    const ad::Array noise = standard_normal(batch.size(), agent.action_dim, rng);
    const auto actor = sac_actor_loss(agent, batch.states, noise);
    check_finite(actor.value, "SAC actor loss");
    apply_gradients(agent.actor, actor.grads[0], "sac.actor");
    st.actor_loss = actor.value;

    if (agent.cfg.learn_alpha) {
        const auto temp = sac_temperature_loss(agent, batch.states, noise);
        check_finite(temp.value, "SAC temperature loss");
        temperature_step(agent.temperature, temp.grad_log_alpha);
        st.temperature_loss = temp.value;
    }
    st.alpha = agent.temperature.alpha();

    soft_update(agent.critic1.params, agent.target1, agent.cfg.tau);
    soft_update(agent.critic2.params, agent.target2, agent.cfg.tau);
    return st;
}

std::vector<double> sac_greedy(const SacAgent& agent, const std::vector<double>& state) {
    if (state.size() != agent.state_dim) throw DimensionError("sac_greedy: state width mismatch");
    const auto head = sac_policy(agent, ad::Array::row(state));
    std::vector<double> a(agent.action_dim);
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = std::tanh(head.mean(0, k));
    return a;
}

}  // namespace semra::agents
