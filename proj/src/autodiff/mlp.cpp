#include "semra/autodiff/mlp.hpp"

#include <cmath>
#include <string>

#include "semra/common/errors.hpp"
#include "semra/kernels/gemm.hpp"

namespace semra::ad {

std::string_view to_string(Activation a) {
    switch (a) {
        case Activation::Relu: return "relu";
        case Activation::Tanh: return "tanh";
        case Activation::Linear: return "linear";
        case Activation::Softmax: return "softmax";
    }
    return "?";
}

std::size_t MlpParams::input_dim() const { return layers.empty() ? 0 : layers.front().weight.rows(); }
std::size_t MlpParams::output_dim() const { return layers.empty() ? 0 : layers.back().weight.cols(); }

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weight.size() + l.bias.size();
    return n;
}

void MlpParams::validate() const {
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        if (l.bias.rows() != 1 || l.bias.cols() != l.weight.cols())
            throw DimensionError("layer " + std::to_string(i) + ": bias shape does not match weight columns");
        if (i > 0 && layers[i - 1].weight.cols() != l.weight.rows())
            throw DimensionError("layer " + std::to_string(i) + ": input dimension " +
                                 std::to_string(l.weight.rows()) + " != previous output " +
                                 std::to_string(layers[i - 1].weight.cols()));
    }
}

std::vector<Array*> MlpParams::tensors() {
    std::vector<Array*> out;
    for (auto& l : layers) {
        out.push_back(&l.weight);
        out.push_back(&l.bias);
    }
    return out;
}

std::vector<const Array*> MlpParams::tensors() const {
    std::vector<const Array*> out;
    for (const auto& l : layers) {
        out.push_back(&l.weight);
        out.push_back(&l.bias);
    }
    return out;
}

std::vector<std::string> MlpParams::tensor_names(std::string_view prefix) const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        out.push_back(std::string(prefix) + "/layer" + std::to_string(i) + "/weight");
        out.push_back(std::string(prefix) + "/layer" + std::to_string(i) + "/bias");
    }
    return out;
}

MlpParams make_mlp(std::span<const std::size_t> sizes, Activation hidden, Activation output, Rng& rng) {
    if (sizes.size() < 2) throw DimensionError("make_mlp: need at least input and output sizes");
    MlpParams p;
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        const std::size_t in = sizes[i], out = sizes[i + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        std::uniform_real_distribution<double> u(-bound, bound);
        DenseLayer l;
        l.weight = Array(in, out);
        l.bias = Array(1, out);
        for (auto& w : l.weight.values()) w = u(rng);
        for (auto& b : l.bias.values()) b = u(rng);
        l.activation = (i + 2 == sizes.size()) ? output : hidden;
        p.layers.push_back(std::move(l));
    }
    return p;
}

MlpBinding bind(Tape& tape, const MlpParams& params, bool trainable) {
    MlpBinding b;
    for (const auto& l : params.layers) {
        b.weights.push_back(trainable ? tape.leaf(l.weight) : tape.constant(l.weight));
        b.biases.push_back(trainable ? tape.leaf(l.bias) : tape.constant(l.bias));
    }
    return b;
}

namespace {
Var activate(Var x, Activation a) {
    switch (a) {
        case Activation::Relu: return relu(x);
        case Activation::Tanh: return tanh(x);
        case Activation::Softmax: return softmax(x);
        case Activation::Linear: break;
    }
    return x;
}

void check_layer_input(const MlpParams& params, std::size_t i, std::size_t cols) {
    if (cols != params.layers[i].weight.rows())
        throw DimensionError("layer " + std::to_string(i) + ": expected input dimension " +
                             std::to_string(params.layers[i].weight.rows()) + ", got " + std::to_string(cols));
}
}  // namespace

Var forward(const MlpParams& params, const MlpBinding& binding, Var input) {
    Var x = input;
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        check_layer_input(params, i, x.tape->value(x).cols());
        x = add(matmul(x, binding.weights[i]), binding.biases[i]);
        x = activate(x, params.layers[i].activation);
    }
    return x;
}

ParamGrads gradients(const Tape& tape, const MlpBinding& binding) {
    ParamGrads g;
    for (std::size_t i = 0; i < binding.weights.size(); ++i) {
        g.push_back(tape.grad(binding.weights[i]));
        g.push_back(tape.grad(binding.biases[i]));
    }
    return g;
}

Array evaluate(const MlpParams& params, const Array& input) {
    Array x = input;
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        const auto& l = params.layers[i];
        check_layer_input(params, i, x.cols());
        Array y(x.rows(), l.weight.cols());
        kernels::gemm_nn(x.values(), l.weight.values(), y.values(), x.rows(), x.cols(), l.weight.cols());
        for (std::size_t r = 0; r < y.rows(); ++r)
            for (std::size_t c = 0; c < y.cols(); ++c) y(r, c) += l.bias[c];
        switch (l.activation) {
            case Activation::Relu:
                for (auto& v : y.values()) v = v > 0.0 ? v : 0.0;
                break;
            case Activation::Tanh:
                for (auto& v : y.values()) v = std::tanh(v);
                break;
            case Activation::Softmax:
                for (std::size_t r = 0; r < y.rows(); ++r) {
                    auto row = y.row_span(r);
                    double mx = row[0];
                    for (double v : row) mx = std::max(mx, v);
                    double s = 0.0;
                    for (auto& v : row) s += (v = std::exp(v - mx));
                    for (auto& v : row) v /= s;
                }
                break;
            case Activation::Linear:
                break;
        }
        x = std::move(y);
    }
    return x;
}

GraphEval graph_eval(const MlpParams& params, const Array& input) {
    GraphEval e;
    e.graph = std::make_unique<Tape>();
    e.binding = bind(*e.graph, params, true);
    e.input = e.graph->leaf(input);
    e.out = forward(params, e.binding, e.input);
    e.output = e.graph->value(e.out);
    return e;
}

ParamGrads backprop(GraphEval& eval, const Array& loss_grad) {
    if (!eval.graph || !eval.out.valid()) throw UsageError("backprop called before forward evaluation");
    eval.graph->backward(eval.out, loss_grad);
    return gradients(*eval.graph, eval.binding);
}

}  // namespace semra::ad
