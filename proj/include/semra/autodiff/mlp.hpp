#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semra/autodiff/array.hpp"
#include "semra/autodiff/tape.hpp"
#include "semra/common/rng.hpp"

namespace semra::ad {

enum class Activation { Relu, Tanh, Linear, Softmax };

std::string_view to_string(Activation a);

// weight is (in x out) so a batch forward is X * W + b.
struct DenseLayer {
    Array weight;
    Array bias;  // 1 x out
    Activation activation = Activation::Linear;

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

struct MlpParams {
    std::vector<DenseLayer> layers;

    std::size_t input_dim() const;
    std::size_t output_dim() const;
    std::size_t parameter_count() const;
    // Throws DimensionError if consecutive layer dimensions disagree.
    void validate() const;

    // Parameter tensors in declared order: w0, b0, w1, b1, ...
    std::vector<Array*> tensors();
    std::vector<const Array*> tensors() const;
    std::vector<std::string> tensor_names(std::string_view prefix) const;

    friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

// Gradients in the same order as MlpParams::tensors().
using ParamGrads = std::vector<Array>;

// Layer sizes {in, h1, ..., out}; hidden layers use `hidden`, the last uses `output`.
// Weights and biases ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
MlpParams make_mlp(std::span<const std::size_t> sizes, Activation hidden, Activation output, Rng& rng);

struct MlpBinding {
    std::vector<Var> weights;
    std::vector<Var> biases;
};

// Registers the parameters on the tape, as leaves (trainable) or constants.
MlpBinding bind(Tape& tape, const MlpParams& params, bool trainable = true);
Var forward(const MlpParams& params, const MlpBinding& binding, Var input);
ParamGrads gradients(const Tape& tape, const MlpBinding& binding);

// Tape-free forward pass; same arithmetic as the recorded one.
Array evaluate(const MlpParams& params, const Array& input);

struct GraphEval {
    Array output;
    std::unique_ptr<Tape> graph;
    MlpBinding binding;
    Var input;
    Var out;
};

GraphEval graph_eval(const MlpParams& params, const Array& input);
ParamGrads backprop(GraphEval& eval, const Array& loss_grad);

}  // namespace semra::ad
