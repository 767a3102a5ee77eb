#pragma once

#include <string_view>
#include <vector>

#include "semra/autodiff/adam.hpp"
#include "semra/autodiff/mlp.hpp"

namespace semra::agents {

// target = (1 - tau) * target + tau * online, tensor by tensor.
// Throws DimensionError on shape mismatch and DomainError for tau outside [0, 1].
void soft_update(const ad::MlpParams& online, ad::MlpParams& target, double tau);

// Scalar log-temperature with its own Adam state.
struct Temperature {
    ad::Array log_alpha = ad::Array::scalar(0.0);
    ad::AdamState adam;

    double alpha() const;
};

Temperature make_temperature(double alpha, const ad::AdamConfig& cfg);
void temperature_step(Temperature& t, double grad_log_alpha);

// Network trained by one optimizer, with a label for diagnostics.
struct Trainable {
    ad::MlpParams params;
    ad::AdamState adam;
};

Trainable make_trainable(const std::vector<std::size_t>& sizes, ad::Activation output, const ad::AdamConfig& cfg,
                         Rng& rng);
void apply_gradients(Trainable& net, const ad::ParamGrads& grads, std::string_view name);

}  // namespace semra::agents
