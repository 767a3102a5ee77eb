#include "semra/autodiff/adam.hpp"

#include <cmath>

#include "semra/common/errors.hpp"

namespace semra::ad {

AdamState make_adam(std::span<const Array* const> params, const AdamConfig& config) {
    AdamState s;
    s.config = config;
    for (const Array* p : params) {
        s.m.push_back(Array::zeros_like(*p));
        s.v.push_back(Array::zeros_like(*p));
        s.tensor_steps.push_back(0);
    }
    return s;
}

AdamState make_adam(const MlpParams& params, const AdamConfig& config) {
    auto t = params.tensors();
    return make_adam(std::span<const Array* const>(t.data(), t.size()), config);
}

void adam_step(std::span<Array* const> params, std::span<const Array> grads, AdamState& state,
               std::span<const std::string> paths) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw DimensionError("adam_step: parameter, gradient and state counts differ");
    const auto& c = state.config;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const Array& g = grads[i];
        Array& p = *params[i];
        const std::string& path = i < paths.size() ? paths[i] : std::to_string(i);
        if (!g.same_shape(p)) throw DimensionError("adam_step: gradient shape mismatch for " + path);
        if (!g.all_finite()) throw TrainingError("non-finite gradient in " + path);
    }
    ++state.t;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const Array& g = grads[i];
        if (g.all_zero()) continue;
        Array& p = *params[i];
        Array& m = state.m[i];
        Array& v = state.v[i];
        const auto step = ++state.tensor_steps[i];
        const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(step));
        const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(step));
        for (std::size_t k = 0; k < p.size(); ++k) {
            const double gk = g[k] + c.weight_decay * p[k];
            m[k] = c.beta1 * m[k] + (1.0 - c.beta1) * gk;
            v[k] = c.beta2 * v[k] + (1.0 - c.beta2) * gk * gk;
            const double mhat = m[k] / bc1;
            const double vhat = v[k] / bc2;
            p[k] -= c.learning_rate * mhat / (std::sqrt(vhat) + c.epsilon);
        }
    }
}

void adam_step(MlpParams& params, const ParamGrads& grads, AdamState& state, std::string_view name) {
    auto t = params.tensors();
    auto names = params.tensor_names(name);
    adam_step(std::span<Array* const>(t.data(), t.size()), grads, state, names);
}

}  // namespace semra::ad
