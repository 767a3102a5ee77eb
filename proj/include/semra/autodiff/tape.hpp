#pragma once

// Tape-based reverse-mode differentiation over Arrays.
//
// A Tape records every operation in evaluation order, so node ids are
// topologically sorted by construction and backward() is a single reverse
// sweep. Binary elementwise ops broadcast an operand whose row or column
// count is 1 (row vectors, column vectors and scalars).

#include <cstddef>
#include <vector>

#include "semra/autodiff/array.hpp"

namespace semra::ad {

class Tape;

struct Var {
    Tape* tape = nullptr;
    int id = -1;
    bool valid() const noexcept { return tape != nullptr && id >= 0; }
};

enum class Op {
    Leaf,
    Constant,
    MatMul,
    Add,
    Sub,
    Mul,
    Scale,
    AddScalar,
    Tanh,
    Relu,
    Exp,
    Log,
    Square,
    Softmax,
    LogSoftmax,
    Sum,
    SumRows,
    Mean,
    Concat,
    Slice,
    Minimum,
    Clamp,
    StraightThrough,
};

// Inputs to log are floored here; the gradient is zero below the floor.
inline constexpr double kLogFloor = 1e-12;

class Tape {
public:
    Var leaf(Array value);      // differentiable input
    Var constant(Array value);  // excluded from differentiation

    const Array& value(Var v) const;
    // Gradient of the last backward() output w.r.t. v; zeros if none reached it.
    Array grad(Var v) const;

    void backward(Var output, const Array& seed);
    void backward(Var scalar_output);  // seed of 1 on a 1x1 output
    bool has_backward() const noexcept { return backward_done_; }

    std::size_t size() const noexcept { return nodes_.size(); }
    Op op(Var v) const { return nodes_.at(static_cast<std::size_t>(v.id)).op; }

    // Internal node storage; used by the op implementations.
    struct Node {
        Op op = Op::Leaf;
        int a = -1;
        int b = -1;
        double p0 = 0.0;
        double p1 = 0.0;
        std::size_t offset = 0;
        bool requires_grad = false;
        Array value;
        Array grad;
    };
    Var push(Node node);
    const Node& node(Var v) const;
    Node& node(Var v);

private:
    void accumulate(int id, const Array& g);

    std::vector<Node> nodes_;
    bool backward_done_ = false;
};

Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var minimum(Var a, Var b);
Var scale(Var a, double c);
Var add_scalar(Var a, double c);
Var tanh(Var a);
Var relu(Var a);
Var exp(Var a);
Var log(Var a);
Var square(Var a);
Var softmax(Var a);      // row-wise, max-subtracted
Var log_softmax(Var a);  // row-wise, max-subtracted
Var sum(Var a);          // -> 1x1
Var sum_rows(Var a);     // -> rows x 1
Var mean(Var a);         // -> 1x1
Var concat(Var a, Var b);  // column-wise
Var slice(Var a, std::size_t col_begin, std::size_t col_count);
Var clamp(Var a, double lo, double hi);
// Forward value is `forward_value`; backward passes gain * upstream to `input`.
Var straight_through(Var input, Array forward_value, double gain);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }
inline Var operator*(double c, Var a) { return scale(a, c); }
inline Var operator-(Var a) { return scale(a, -1.0); }

// Pure helper behind the StraightThrough op.
Array straight_through_grad(const Array& forward_value, const Array& upstream_grad, double gain);

}  // namespace semra::ad
