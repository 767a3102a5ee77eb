#include "semra/agents/networks.hpp"

#include <cmath>
#include <string>

#include "semra/common/errors.hpp"

namespace semra::agents {

void soft_update(const ad::MlpParams& online, ad::MlpParams& target, double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("soft_update: tau must lie in [0, 1]");
    auto src = online.tensors();
    auto dst = target.tensors();
    if (src.size() != dst.size()) throw DimensionError("soft_update: networks have different layer counts");
    for (std::size_t i = 0; i < src.size(); ++i)
        if (!src[i]->same_shape(*dst[i]))
            throw DimensionError("soft_update: tensor " + std::to_string(i) + " shape mismatch");
    for (std::size_t i = 0; i < src.size(); ++i) {
        auto s = src[i]->values();
        auto d = dst[i]->values();
        for (std::size_t k = 0; k < d.size(); ++k) d[k] = (1.0 - tau) * d[k] + tau * s[k];
    }
}

double Temperature::alpha() const { return std::exp(log_alpha[0]); }

Temperature make_temperature(double alpha, const ad::AdamConfig& cfg) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("drl.init_alpha", "must be positive and finite");
    Temperature t;
    t.log_alpha = ad::Array::scalar(std::log(alpha));
    ad::AdamConfig c = cfg;
    c.weight_decay = 0.0;
    const ad::Array* p = &t.log_alpha;
    t.adam = ad::make_adam(std::span<const ad::Array* const>(&p, 1), c);
    return t;
}

void temperature_step(Temperature& t, double grad_log_alpha) {
    ad::Array* p = &t.log_alpha;
    const ad::Array g = ad::Array::scalar(grad_log_alpha);
    const std::string path = "log_alpha";
    ad::adam_step(std::span<ad::Array* const>(&p, 1), std::span<const ad::Array>(&g, 1), t.adam,
                  std::span<const std::string>(&path, 1));
}

Trainable make_trainable(const std::vector<std::size_t>& sizes, ad::Activation output, const ad::AdamConfig& cfg,
                         Rng& rng) {
    Trainable t;
    t.params = ad::make_mlp(sizes, ad::Activation::Relu, output, rng);
    t.adam = ad::make_adam(t.params, cfg);
    return t;
}

void apply_gradients(Trainable& net, const ad::ParamGrads& grads, std::string_view name) {
    ad::adam_step(net.params, grads, net.adam, name);
}

}  // namespace semra::agents
