#include "semra/autodiff/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "semra/common/errors.hpp"
#include "semra/kernels/gemm.hpp"

namespace semra::ad {
namespace {

std::string shape_str(const Array& a) { return std::to_string(a.rows()) + "x" + std::to_string(a.cols()); }

// Broadcast result shape of two operands; each dim must match or be 1.
std::pair<std::size_t, std::size_t> broadcast_shape(const Array& a, const Array& b, const char* op) {
    auto dim = [&](std::size_t x, std::size_t y) {
        if (x == y || y == 1) return x;
        if (x == 1) return y;
        throw DimensionError(std::string(op) + ": cannot broadcast " + shape_str(a) + " with " + shape_str(b));
    };
    return {dim(a.rows(), b.rows()), dim(a.cols(), b.cols())};
}

inline std::size_t bidx(const Array& x, std::size_t r, std::size_t c) {
    return (x.rows() == 1 ? 0 : r) * x.cols() + (x.cols() == 1 ? 0 : c);
}

// Sum g (rows x cols) down to the shape of target.
Array reduce_to(const Array& g, const Array& target) {
    if (g.same_shape(target)) return g;
    Array out(target.rows(), target.cols());
    for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t c = 0; c < g.cols(); ++c) out[bidx(target, r, c)] += g(r, c);
    return out;
}

template <class F>
Array map(const Array& a, F f) {
    Array out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i]);
    return out;
}

}  // namespace

Var Tape::push(Node n) {
    backward_done_ = false;
    nodes_.push_back(std::move(n));
    return Var{this, static_cast<int>(nodes_.size() - 1)};
}

const Tape::Node& Tape::node(Var v) const {
    if (v.tape != this || v.id < 0 || static_cast<std::size_t>(v.id) >= nodes_.size())
        throw UsageError("Var does not belong to this tape");
    return nodes_[static_cast<std::size_t>(v.id)];
}

Tape::Node& Tape::node(Var v) {
    return const_cast<Node&>(static_cast<const Tape*>(this)->node(v));
}

Var Tape::leaf(Array value) {
    Node n;
    n.op = Op::Leaf;
    n.requires_grad = true;
    n.value = std::move(value);
    return push(std::move(n));
}

Var Tape::constant(Array value) {
    Node n;
    n.op = Op::Constant;
    n.value = std::move(value);
    return push(std::move(n));
}

const Array& Tape::value(Var v) const { return node(v).value; }

Array Tape::grad(Var v) const {
    const Node& n = node(v);
    if (!backward_done_) throw UsageError("grad() requested before backward()");
    if (n.grad.empty()) return Array::zeros_like(n.value);
    return n.grad;
}

void Tape::accumulate(int id, const Array& g) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.requires_grad) return;
    if (n.grad.empty()) {
        n.grad = g;
        return;
    }
    for (std::size_t i = 0; i < g.size(); ++i) n.grad[i] += g[i];
}

void Tape::backward(Var scalar_output) {
    if (node(scalar_output).value.size() != 1) throw DimensionError("backward(): output is not a scalar");
    backward(scalar_output, Array::scalar(1.0));
}

void Tape::backward(Var output, const Array& seed) {
    if (nodes_.empty()) throw UsageError("backward() on an empty graph; evaluate forward first");
    const Node& out = node(output);
    if (!seed.same_shape(out.value))
        throw DimensionError("backward(): seed " + shape_str(seed) + " vs output " + shape_str(out.value));
    for (auto& n : nodes_) n.grad = Array();
    nodes_[static_cast<std::size_t>(output.id)].grad = seed;

    for (int id = output.id; id >= 0; --id) {
        Node& n = nodes_[static_cast<std::size_t>(id)];
        if (!n.requires_grad || n.grad.empty()) continue;
        const Array& g = n.grad;
        switch (n.op) {
            case Op::Leaf:
            case Op::Constant:
                break;
            case Op::MatMul: {
                const Array& a = nodes_[n.a].value;
                const Array& b = nodes_[n.b].value;
                if (nodes_[n.a].requires_grad) {
                    Array ga(a.rows(), a.cols());
                    kernels::gemm_nt(g.values(), b.values(), ga.values(), a.rows(), b.cols(), a.cols());
                    accumulate(n.a, ga);
                }
                if (nodes_[n.b].requires_grad) {
                    Array gb(b.rows(), b.cols());
                    kernels::gemm_tn(a.values(), g.values(), gb.values(), b.rows(), a.rows(), b.cols());
                    accumulate(n.b, gb);
                }
                break;
            }
            case Op::Add:
            case Op::Sub: {
                const Array& a = nodes_[n.a].value;
                const Array& b = nodes_[n.b].value;
                if (nodes_[n.a].requires_grad) accumulate(n.a, reduce_to(g, a));
                if (nodes_[n.b].requires_grad) {
                    Array gb = reduce_to(g, b);
                    if (n.op == Op::Sub)
                        for (auto& x : gb.values()) x = -x;
                    accumulate(n.b, gb);
                }
                break;
            }
            case Op::Mul: {
                const Array& a = nodes_[n.a].value;
                const Array& b = nodes_[n.b].value;
                if (nodes_[n.a].requires_grad) {
                    Array ga(g.rows(), g.cols());
                    for (std::size_t r = 0; r < g.rows(); ++r)
                        for (std::size_t c = 0; c < g.cols(); ++c) ga(r, c) = g(r, c) * b[bidx(b, r, c)];
                    accumulate(n.a, reduce_to(ga, a));
                }
                if (nodes_[n.b].requires_grad) {
                    Array gb(g.rows(), g.cols());
                    for (std::size_t r = 0; r < g.rows(); ++r)
                        for (std::size_t c = 0; c < g.cols(); ++c) gb(r, c) = g(r, c) * a[bidx(a, r, c)];
                    accumulate(n.b, reduce_to(gb, b));
                }
                break;
            }
            case Op::Minimum: {
                const Array& a = nodes_[n.a].value;
                const Array& b = nodes_[n.b].value;
                Array ga(g.rows(), g.cols()), gb(g.rows(), g.cols());
                for (std::size_t r = 0; r < g.rows(); ++r)
                    for (std::size_t c = 0; c < g.cols(); ++c) {
                        if (a[bidx(a, r, c)] <= b[bidx(b, r, c)])
                            ga(r, c) = g(r, c);
                        else
                            gb(r, c) = g(r, c);
                    }
                if (nodes_[n.a].requires_grad) accumulate(n.a, reduce_to(ga, a));
                if (nodes_[n.b].requires_grad) accumulate(n.b, reduce_to(gb, b));
                break;
            }
            case Op::Scale:
                accumulate(n.a, map(g, [c = n.p0](double x) { return c * x; }));
                break;
            case Op::AddScalar:
                accumulate(n.a, g);
                break;
            case Op::Tanh: {
                Array ga(g.rows(), g.cols());
                for (std::size_t i = 0; i < g.size(); ++i) ga[i] = g[i] * (1.0 - n.value[i] * n.value[i]);
                accumulate(n.a, ga);
                break;
            }
            case Op::Relu: {
                const Array& a = nodes_[n.a].value;
                Array ga(g.rows(), g.cols());
                for (std::size_t i = 0; i < g.size(); ++i) ga[i] = a[i] > 0.0 ? g[i] : 0.0;
                accumulate(n.a, ga);
                break;
            }
            case Op::Exp: {
                Array ga(g.rows(), g.cols());
                for (std::size_t i = 0; i < g.size(); ++i) ga[i] = g[i] * n.value[i];
                accumulate(n.a, ga);
                break;
            }
            case Op::Log: {
                const Array& a = nodes_[n.a].value;
                Array ga(g.rows(), g.cols());
                for (std::size_t i = 0; i < g.size(); ++i) ga[i] = a[i] > kLogFloor ? g[i] / a[i] : 0.0;
                accumulate(n.a, ga);
                break;
            }
            case Op::Square: {
                const Array& a = nodes_[n.a].value;
                Array ga(g.rows(), g.cols());
                for (std::size_t i = 0; i < g.size(); ++i) ga[i] = 2.0 * a[i] * g[i];
                accumulate(n.a, ga);
                break;
            }
            case Op::Softmax: {
                const Array& y = n.value;
                Array ga(g.rows(), g.cols());
                for (std::size_t r = 0; r < y.rows(); ++r) {
                    double dot = 0.0;
                    for (std::size_t c = 0; c < y.cols(); ++c) dot += g(r, c) * y(r, c);
                    for (std::size_t c = 0; c < y.cols(); ++c) ga(r, c) = y(r, c) * (g(r, c) - dot);
                }
                accumulate(n.a, ga);
                break;
            }
            case Op::LogSoftmax: {
                const Array& y = n.value;
                Array ga(g.rows(), g.cols());
                for (std::size_t r = 0; r < y.rows(); ++r) {
                    double gs = 0.0;
                    for (std::size_t c = 0; c < y.cols(); ++c) gs += g(r, c);
                    for (std::size_t c = 0; c < y.cols(); ++c) ga(r, c) = g(r, c) - std::exp(y(r, c)) * gs;
                }
                accumulate(n.a, ga);
                break;
            }
            case Op::Sum: {
                const Array& a = nodes_[n.a].value;
                accumulate(n.a, Array(a.rows(), a.cols(), g[0]));
                break;
            }
            case Op::Mean: {
                const Array& a = nodes_[n.a].value;
                accumulate(n.a, Array(a.rows(), a.cols(), g[0] / static_cast<double>(a.size())));
                break;
            }
            case Op::SumRows: {
                const Array& a = nodes_[n.a].value;
                Array ga(a.rows(), a.cols());
                for (std::size_t r = 0; r < a.rows(); ++r)
                    for (std::size_t c = 0; c < a.cols(); ++c) ga(r, c) = g(r, 0);
                accumulate(n.a, ga);
                break;
            }
            case Op::Concat: {
                const Array& a = nodes_[n.a].value;
                const Array& b = nodes_[n.b].value;
                Array ga(a.rows(), a.cols()), gb(b.rows(), b.cols());
                for (std::size_t r = 0; r < g.rows(); ++r) {
                    for (std::size_t c = 0; c < a.cols(); ++c) ga(r, c) = g(r, c);
                    for (std::size_t c = 0; c < b.cols(); ++c) gb(r, c) = g(r, a.cols() + c);
                }
                if (nodes_[n.a].requires_grad) accumulate(n.a, ga);
                if (nodes_[n.b].requires_grad) accumulate(n.b, gb);
                break;
            }
            case Op::Slice: {
                const Array& a = nodes_[n.a].value;
                Array ga(a.rows(), a.cols());
                for (std::size_t r = 0; r < g.rows(); ++r)
                    for (std::size_t c = 0; c < g.cols(); ++c) ga(r, n.offset + c) = g(r, c);
                accumulate(n.a, ga);
                break;
            }
            case Op::Clamp: {
                const Array& a = nodes_[n.a].value;
                Array ga(g.rows(), g.cols());
                for (std::size_t i = 0; i < g.size(); ++i)
                    ga[i] = (a[i] >= n.p0 && a[i] <= n.p1) ? g[i] : 0.0;
                accumulate(n.a, ga);
                break;
            }
            case Op::StraightThrough:
                accumulate(n.a, straight_through_grad(n.value, g, n.p0));
                break;
        }
    }
    backward_done_ = true;
}

Array straight_through_grad(const Array& forward_value, const Array& upstream_grad, double gain) {
    if (!forward_value.same_shape(upstream_grad))
        throw DimensionError("straight_through: upstream gradient shape differs from forward value");
    Array out(upstream_grad.rows(), upstream_grad.cols());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = gain * upstream_grad[i];
    return out;
}

namespace {
void same_tape(Var a, Var b) {
    if (!a.valid() || !b.valid() || a.tape != b.tape) throw UsageError("operands live on different tapes");
}
}  // namespace

Var matmul(Var a, Var b) {
    same_tape(a, b);
    Tape& t = *a.tape;
    const Array& x = t.node(a).value;
    const Array& w = t.node(b).value;
    if (x.cols() != w.rows())
        throw DimensionError("matmul: " + shape_str(x) + " x " + shape_str(w));
    Tape::Node n;
    n.op = Op::MatMul;
    n.a = a.id;
    n.b = b.id;
    n.requires_grad = t.node(a).requires_grad || t.node(b).requires_grad;
    n.value = Array(x.rows(), w.cols());
    kernels::gemm_nn(x.values(), w.values(), n.value.values(), x.rows(), x.cols(), w.cols());
    return t.push(std::move(n));
}

namespace {
Var binary_elementwise(Op op, Var a, Var b) {
    same_tape(a, b);
    Tape& t = *a.tape;
    const Array& x = t.node(a).value;
    const Array& y = t.node(b).value;
    const char* name = op == Op::Add ? "add" : op == Op::Sub ? "sub" : op == Op::Mul ? "mul" : "minimum";
    auto [rows, cols] = broadcast_shape(x, y, name);
    Tape::Node n;
    n.op = op;
    n.a = a.id;
    n.b = b.id;
    n.requires_grad = t.node(a).requires_grad || t.node(b).requires_grad;
    n.value = Array(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const double u = x[bidx(x, r, c)];
            const double v = y[bidx(y, r, c)];
            double out = 0.0;
            switch (op) {
                case Op::Add: out = u + v; break;
                case Op::Sub: out = u - v; break;
                case Op::Mul: out = u * v; break;
                default: out = u <= v ? u : v; break;
            }
            n.value(r, c) = out;
        }
    return t.push(std::move(n));
}
}  // namespace

Var add(Var a, Var b) { return binary_elementwise(Op::Add, a, b); }
Var sub(Var a, Var b) { return binary_elementwise(Op::Sub, a, b); }
Var mul(Var a, Var b) { return binary_elementwise(Op::Mul, a, b); }
Var minimum(Var a, Var b) { return binary_elementwise(Op::Minimum, a, b); }

namespace {
template <class F>
Var unary(Op op, Var a, F f, double p0 = 0.0, double p1 = 0.0) {
    if (!a.valid()) throw UsageError("operand is not bound to a tape");
    Tape& t = *a.tape;
    Tape::Node n;
    n.op = op;
    n.a = a.id;
    n.p0 = p0;
    n.p1 = p1;
    n.requires_grad = t.node(a).requires_grad;
    n.value = f(t.node(a).value);
    return t.push(std::move(n));
}
}  // namespace

Var scale(Var a, double c) {
    return unary(Op::Scale, a, [c](const Array& x) { return map(x, [c](double v) { return c * v; }); }, c);
}

Var add_scalar(Var a, double c) {
    return unary(Op::AddScalar, a, [c](const Array& x) { return map(x, [c](double v) { return v + c; }); }, c);
}

Var tanh(Var a) {
    return unary(Op::Tanh, a, [](const Array& x) { return map(x, [](double v) { return std::tanh(v); }); });
}

Var relu(Var a) {
    return unary(Op::Relu, a, [](const Array& x) { return map(x, [](double v) { return v > 0.0 ? v : 0.0; }); });
}

Var exp(Var a) {
    return unary(Op::Exp, a, [](const Array& x) { return map(x, [](double v) { return std::exp(v); }); });
}

Var log(Var a) {
    return unary(Op::Log, a,
                 [](const Array& x) { return map(x, [](double v) { return std::log(std::max(v, kLogFloor)); }); });
}

Var square(Var a) {
    return unary(Op::Square, a, [](const Array& x) { return map(x, [](double v) { return v * v; }); });
}

Var softmax(Var a) {
    return unary(Op::Softmax, a, [](const Array& x) {
        Array y(x.rows(), x.cols());
        for (std::size_t r = 0; r < x.rows(); ++r) {
            double mx = -std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < x.cols(); ++c) mx = std::max(mx, x(r, c));
            double s = 0.0;
            for (std::size_t c = 0; c < x.cols(); ++c) s += (y(r, c) = std::exp(x(r, c) - mx));
            for (std::size_t c = 0; c < x.cols(); ++c) y(r, c) /= s;
        }
        return y;
    });
}

Var log_softmax(Var a) {
    return unary(Op::LogSoftmax, a, [](const Array& x) {
        Array y(x.rows(), x.cols());
        for (std::size_t r = 0; r < x.rows(); ++r) {
            double mx = -std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < x.cols(); ++c) mx = std::max(mx, x(r, c));
            double s = 0.0;
            for (std::size_t c = 0; c < x.cols(); ++c) s += std::exp(x(r, c) - mx);
            const double lse = mx + std::log(s);
            for (std::size_t c = 0; c < x.cols(); ++c) y(r, c) = x(r, c) - lse;
        }
        return y;
    });
}

Var sum(Var a) {
    return unary(Op::Sum, a, [](const Array& x) {
        double s = 0.0;
        for (double v : x.values()) s += v;
        return Array::scalar(s);
    });
}

Var mean(Var a) {
    return unary(Op::Mean, a, [](const Array& x) {
        if (x.empty()) throw DomainError("mean of an empty array");
        double s = 0.0;
        for (double v : x.values()) s += v;
        return Array::scalar(s / static_cast<double>(x.size()));
    });
}

Var sum_rows(Var a) {
    return unary(Op::SumRows, a, [](const Array& x) {
        Array y(x.rows(), 1);
        for (std::size_t r = 0; r < x.rows(); ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < x.cols(); ++c) s += x(r, c);
            y[r] = s;
        }
        return y;
    });
}

Var concat(Var a, Var b) {
    same_tape(a, b);
    Tape& t = *a.tape;
    const Array& x = t.node(a).value;
    const Array& y = t.node(b).value;
    if (x.rows() != y.rows()) throw DimensionError("concat: row counts " + shape_str(x) + " vs " + shape_str(y));
    Tape::Node n;
    n.op = Op::Concat;
    n.a = a.id;
    n.b = b.id;
    n.requires_grad = t.node(a).requires_grad || t.node(b).requires_grad;
    n.value = Array(x.rows(), x.cols() + y.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t c = 0; c < x.cols(); ++c) n.value(r, c) = x(r, c);
        for (std::size_t c = 0; c < y.cols(); ++c) n.value(r, x.cols() + c) = y(r, c);
    }
    return t.push(std::move(n));
}

Var slice(Var a, std::size_t col_begin, std::size_t col_count) {
    if (!a.valid()) throw UsageError("operand is not bound to a tape");
    Tape& t = *a.tape;
    const Array& x = t.node(a).value;
    if (col_begin + col_count > x.cols())
        throw DimensionError("slice: columns [" + std::to_string(col_begin) + ", " +
                             std::to_string(col_begin + col_count) + ") out of " + shape_str(x));
    Tape::Node n;
    n.op = Op::Slice;
    n.a = a.id;
    n.offset = col_begin;
    n.requires_grad = t.node(a).requires_grad;
    n.value = Array(x.rows(), col_count);
    for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t c = 0; c < col_count; ++c) n.value(r, c) = x(r, col_begin + c);
    return t.push(std::move(n));
}

Var clamp(Var a, double lo, double hi) {
    return unary(
        Op::Clamp, a, [lo, hi](const Array& x) { return map(x, [lo, hi](double v) { return std::clamp(v, lo, hi); }); },
        lo, hi);
}

Var straight_through(Var input, Array forward_value, double gain) {
    if (!input.valid()) throw UsageError("operand is not bound to a tape");
    Tape& t = *input.tape;
    if (!forward_value.same_shape(t.node(input).value))
        throw DimensionError("straight_through: forward value " + shape_str(forward_value) + " vs input " +
                             shape_str(t.node(input).value));
    Tape::Node n;
    n.op = Op::StraightThrough;
    n.a = input.id;
    n.p0 = gain;
    n.requires_grad = t.node(input).requires_grad;
    n.value = std::move(forward_value);
    return t.push(std::move(n));
}

}  // namespace semra::ad
