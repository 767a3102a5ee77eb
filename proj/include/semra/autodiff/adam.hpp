#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semra/autodiff/array.hpp"
#include "semra/autodiff/mlp.hpp"

namespace semra::ad {

struct AdamConfig {
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.97;
    double epsilon = 1e-8;
    double weight_decay = 5e-4;  // L2 term folded into the gradient
};

struct AdamState {
    AdamConfig config;
    std::vector<Array> m;
    std::vector<Array> v;
    std::vector<std::int64_t> tensor_steps;  // per-tensor bias-correction counters
    std::int64_t t = 0;                      // adam_step calls
};

AdamState make_adam(std::span<const Array* const> params, const AdamConfig& config);
AdamState make_adam(const MlpParams& params, const AdamConfig& config);

// One Adam update. A tensor whose gradient is identically zero is treated as
// not having received a gradient and is left untouched, moments included.
// Throws TrainingError naming the tensor path on a non-finite gradient.
void adam_step(std::span<Array* const> params, std::span<const Array> grads, AdamState& state,
               std::span<const std::string> paths);
void adam_step(MlpParams& params, const ParamGrads& grads, AdamState& state, std::string_view name);

}  // namespace semra::ad
