#include <doctest.h>

#include <cmath>
#include <string>

#include "semra/autodiff/adam.hpp"
#include "semra/autodiff/mlp.hpp"
#include "semra/autodiff/tape.hpp"
#include "semra/common/errors.hpp"
#include "support/generators.hpp"
#include "support/gradcheck.hpp"

using namespace semra;
using namespace semra::ad;
using semra::testing::ScalarFn;

namespace {

// Contracts an arbitrary-shaped output with fixed random weights so every
// output entry contributes a distinct coefficient to the scalar.
Var contract(Tape& t, Var y, Rng& rng) {
    const Array& v = t.value(y);
    return sum(mul(y, t.constant(semra::testing::random_array(v.rows(), v.cols(), rng))));
}

void check_op(const char* name, std::vector<Array> (*make_inputs)(Rng&),
              Var (*op)(Tape&, const std::vector<Var>&)) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        auto inputs = make_inputs(rng);
        const std::uint64_t wseed = rng();
        ScalarFn f = [&](Tape& t, const std::vector<Var>& x) {
            Rng w(wseed);
            return contract(t, op(t, x), w);
        };
        const auto a = semra::testing::analytic_grads(f, inputs);
        const auto n = semra::testing::numeric_grads(f, inputs);
        const double err = semra::testing::max_relative_error(a, n);
        INFO(name << " seed " << seed);
        REQUIRE(err < 1e-4);
    }
}

std::vector<Array> two_3x4(Rng& r) { return {semra::testing::random_array(3, 4, r), semra::testing::random_array(3, 4, r)}; }
std::vector<Array> one_3x4(Rng& r) { return {semra::testing::random_array(3, 4, r, -2.0, 2.0)}; }

}  // namespace

TEST_CASE("every op matches central finite differences over 100 seeds") {
    check_op("matmul", [](Rng& r) { return std::vector<Array>{semra::testing::random_array(3, 4, r), semra::testing::random_array(4, 2, r)}; },
             [](Tape&, const std::vector<Var>& x) { return matmul(x[0], x[1]); });
    check_op("add", two_3x4, [](Tape&, const std::vector<Var>& x) { return add(x[0], x[1]); });
    check_op("add-broadcast-row", [](Rng& r) { return std::vector<Array>{semra::testing::random_array(3, 4, r), semra::testing::random_array(1, 4, r)}; },
             [](Tape&, const std::vector<Var>& x) { return add(x[0], x[1]); });
    check_op("mul-broadcast-col", [](Rng& r) { return std::vector<Array>{semra::testing::random_array(3, 4, r), semra::testing::random_array(3, 1, r)}; },
             [](Tape&, const std::vector<Var>& x) { return mul(x[0], x[1]); });
    check_op("sub", two_3x4, [](Tape&, const std::vector<Var>& x) { return sub(x[0], x[1]); });
    check_op("mul", two_3x4, [](Tape&, const std::vector<Var>& x) { return mul(x[0], x[1]); });
    check_op("minimum", [](Rng& r) {
        auto a = semra::testing::random_array(3, 4, r);
        auto b = semra::testing::random_array(3, 4, r);
        for (std::size_t i = 0; i < a.size(); ++i)
            if (std::abs(a[i] - b[i]) < 1e-2) b[i] += 0.1;
        return std::vector<Array>{a, b};
    }, [](Tape&, const std::vector<Var>& x) { return minimum(x[0], x[1]); });
    check_op("scale", one_3x4, [](Tape&, const std::vector<Var>& x) { return scale(x[0], -1.7); });
    check_op("add_scalar", one_3x4, [](Tape&, const std::vector<Var>& x) { return add_scalar(x[0], 0.3); });
    check_op("tanh", one_3x4, [](Tape&, const std::vector<Var>& x) { return ad::tanh(x[0]); });
    check_op("relu", [](Rng& r) { return std::vector<Array>{semra::testing::random_away_from(3, 4, r, {0.0})}; },
             [](Tape&, const std::vector<Var>& x) { return relu(x[0]); });
    check_op("exp", one_3x4, [](Tape&, const std::vector<Var>& x) { return ad::exp(x[0]); });
    check_op("log", [](Rng& r) { return std::vector<Array>{semra::testing::random_array(3, 4, r, 0.1, 3.0)}; },
             [](Tape&, const std::vector<Var>& x) { return ad::log(x[0]); });
    check_op("square", one_3x4, [](Tape&, const std::vector<Var>& x) { return square(x[0]); });
    check_op("softmax", one_3x4, [](Tape&, const std::vector<Var>& x) { return softmax(x[0]); });
    check_op("log_softmax", one_3x4, [](Tape&, const std::vector<Var>& x) { return log_softmax(x[0]); });
    check_op("sum", one_3x4, [](Tape&, const std::vector<Var>& x) { return sum(x[0]); });
    check_op("sum_rows", one_3x4, [](Tape&, const std::vector<Var>& x) { return sum_rows(x[0]); });
    check_op("mean", one_3x4, [](Tape&, const std::vector<Var>& x) { return mean(x[0]); });
    check_op("concat", [](Rng& r) { return std::vector<Array>{semra::testing::random_array(3, 2, r), semra::testing::random_array(3, 5, r)}; },
             [](Tape&, const std::vector<Var>& x) { return concat(x[0], x[1]); });
    check_op("slice", one_3x4, [](Tape&, const std::vector<Var>& x) { return slice(x[0], 1, 2); });
    check_op("clamp", [](Rng& r) { return std::vector<Array>{semra::testing::random_away_from(3, 4, r, {-0.5, 0.5}, 1e-2, -1.0, 1.0)}; },
             [](Tape&, const std::vector<Var>& x) { return clamp(x[0], -0.5, 0.5); });
    check_op("composite", two_3x4, [](Tape&, const std::vector<Var>& x) {
        return log_softmax(ad::tanh(x[0]) * x[1] + square(x[1]));
    });
}

TEST_CASE("backward on polynomial and tanh at known points") {
    Tape t;
    Var x = t.leaf(Array::scalar(3.0));
    t.backward(mul(x, x));
    CHECK(t.grad(x).item() == doctest::Approx(6.0).epsilon(1e-15));

    Tape t2;
    Var z = t2.leaf(Array::scalar(0.0));
    t2.backward(ad::tanh(z));
    CHECK(t2.grad(z).item() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("usage and dimension errors") {
    Tape t;
    Var x = t.leaf(Array(1, 2, 1.0));
    CHECK_THROWS_AS((void)t.grad(x), UsageError);
    CHECK_THROWS_AS(t.backward(x), DimensionError);
    CHECK_THROWS_AS((void)matmul(x, t.leaf(Array(3, 1))), DimensionError);
    CHECK_THROWS_AS((void)add(x, t.leaf(Array(2, 3))), DimensionError);

    GraphEval never;
    CHECK_THROWS_AS((void)backprop(never, Array::scalar(1.0)), UsageError);
}

TEST_CASE("log floors its input and passes no gradient below the floor") {
    Tape t;
    Var x = t.leaf(Array::row({0.0, 2.0}));
    Var y = ad::log(x);
    CHECK(t.value(y)[0] == doctest::Approx(std::log(kLogFloor)));
    t.backward(sum(y));
    CHECK(t.grad(x)[0] == 0.0);
    CHECK(t.grad(x)[1] == doctest::Approx(0.5));
}

TEST_CASE("graph_eval: affine, tanh, softmax stability, layer index in errors") {
    MlpParams p;
    p.layers.push_back({Array(1, 1, 2.0), Array(1, 1, 1.0), Activation::Linear});
    auto e = graph_eval(p, Array::scalar(3.0));
    CHECK(e.output.item() == 7.0);

    MlpParams th;
    th.layers.push_back({Array(1, 1, 0.8), Array(1, 1, 0.0), Activation::Tanh});
    CHECK(graph_eval(th, Array::scalar(0.0)).output.item() == 0.0);

    MlpParams sm;
    sm.layers.push_back({Array(2, 2, std::vector<double>{1, 0, 0, 1}), Array(1, 2, 0.0), Activation::Softmax});
    auto out = graph_eval(sm, Array::row({1000.0, 1000.0})).output;
    CHECK(out.all_finite());
    CHECK(out[0] == doctest::Approx(0.5));
    CHECK(out[1] == doctest::Approx(0.5));

    MlpParams two = sm;
    two.layers.push_back({Array(2, 1, 1.0), Array(1, 1, 0.0), Activation::Linear});
    try {
        (void)graph_eval(two, Array::row({1.0, 2.0, 3.0}));
        FAIL("expected a dimension error");
    } catch (const DimensionError& err) {
        CHECK(std::string(err.what()).find("layer 0") != std::string::npos);
    }
}

TEST_CASE("softmax rows are nonnegative and sum to one") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        Tape t;
        auto a = semra::testing::random_array(4, 6, rng, -50.0, 50.0);
        const Array& s = t.value(softmax(t.constant(a)));
        for (std::size_t r = 0; r < s.rows(); ++r) {
            double acc = 0.0;
            for (double v : s.row_span(r)) {
                CHECK(v >= 0.0);
                acc += v;
            }
            CHECK(std::abs(acc - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("2-layer MLP parameter gradients match finite differences") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        const std::size_t sizes[] = {5, 7, 3};
        MlpParams p = make_mlp(sizes, Activation::Tanh, Activation::Linear, rng);
        Array x = semra::testing::random_array(4, 5, rng);
        Array w = semra::testing::random_array(4, 3, rng);

        auto loss_of = [&](const MlpParams& q) {
            Array y = evaluate(q, x);
            double acc = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i) acc += y[i] * w[i];
            return acc;
        };
        auto e = graph_eval(p, x);
        ParamGrads g = backprop(e, w);
        auto tensors = p.tensors();
        for (std::size_t k = 0; k < tensors.size(); ++k)
            for (std::size_t i = 0; i < tensors[k]->size(); ++i) {
                const double orig = (*tensors[k])[i];
                (*tensors[k])[i] = orig + 1e-5;
                const double fp = loss_of(p);
                (*tensors[k])[i] = orig - 1e-5;
                const double fm = loss_of(p);
                (*tensors[k])[i] = orig;
                const double num = (fp - fm) / 2e-5;
                const double den = std::max({std::abs(num), std::abs(g[k][i]), 1e-6});
                REQUIRE(std::abs(num - g[k][i]) / den < 1e-4);
            }
    }
}

TEST_CASE("forward evaluation is pure and matches the recorded graph") {
    Rng rng(3);
    const std::size_t sizes[] = {6, 8, 8, 4};
    MlpParams p = make_mlp(sizes, Activation::Relu, Activation::Softmax, rng);
    Array x = semra::testing::random_array(5, 6, rng);
    CHECK(evaluate(p, x) == evaluate(p, x));
    CHECK(graph_eval(p, x).output == evaluate(p, x));
}

TEST_CASE("fan-in uniform initialisation bounds") {
    Rng rng(11);
    const std::size_t sizes[] = {16, 4};
    MlpParams p = make_mlp(sizes, Activation::Relu, Activation::Linear, rng);
    for (double v : p.layers[0].weight.values()) CHECK(std::abs(v) <= 0.25);
    CHECK(p.parameter_count() == 16 * 4 + 4);
}

TEST_CASE("adam: zero gradient, descent direction, determinism, non-finite path") {
    Array w = Array::scalar(0.5);
    std::vector<Array*> params{&w};
    AdamConfig cfg;
    cfg.weight_decay = 0.0;
    AdamState st = make_adam(params, cfg);
    const std::vector<std::string> names{"w"};

    std::vector<Array> zero{Array::scalar(0.0)};
    adam_step(params, zero, st, names);
    CHECK(w.item() == 0.5);

    std::vector<Array> one{Array::scalar(1.0)};
    adam_step(params, one, st, names);
    CHECK(w.item() < 0.5);
    CHECK(w.item() == doctest::Approx(0.5 - 1e-4).epsilon(1e-9));

    std::vector<Array> bad{Array::scalar(std::nan(""))};
    try {
        adam_step(params, bad, st, names);
        FAIL("expected a training error");
    } catch (const TrainingError& e) {
        CHECK(std::string(e.what()).find("w") != std::string::npos);
    }

    auto run = [] {
        Rng rng(99);
        const std::size_t sizes[] = {3, 5, 2};
        MlpParams p = make_mlp(sizes, Activation::Relu, Activation::Linear, rng);
        AdamState s = make_adam(p, AdamConfig{});
        for (int i = 0; i < 20; ++i) {
            Array x = semra::testing::random_array(4, 3, rng);
            auto e = graph_eval(p, x);
            adam_step(p, backprop(e, e.output), s, "net");
        }
        return p;
    };
    CHECK(run() == run());
}

TEST_CASE("straight-through gradient scaling") {
    auto g = straight_through_grad(Array::row({9.0, 9.0}), Array::row({0.2, -0.3}), 1.0);
    CHECK(g == Array::row({0.2, -0.3}));
    CHECK(straight_through_grad(Array::row({1.0}), Array::row({2.0}), 0.5) == Array::row({1.0}));
    CHECK(straight_through_grad(Array::row({1.0, 2.0}), Array::row({4.0, -1.0}), 0.0).all_zero());

    Tape t;
    Var x = t.leaf(Array::row({1.0, 2.0}));
    Var y = straight_through(x, Array::row({5.0, 6.0}), 0.5);
    CHECK(t.value(y) == Array::row({5.0, 6.0}));
    t.backward(sum(square(y)));
    CHECK(t.grad(x) == Array::row({5.0, 6.0}));
}
