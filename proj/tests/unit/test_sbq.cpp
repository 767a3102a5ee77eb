#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "semra/common/errors.hpp"
#include "semra/kernels/sbq_batch.hpp"
#include "semra/sbq/codec.hpp"
#include "support/generators.hpp"

using namespace semra;
using namespace semra::sbq;

namespace {
// Half-normal scale whose median is 0.25: 0.25 / Phi^{-1}(0.75).
constexpr double kSourceScale = 0.25 / 0.6744897501960817;
}  // namespace

TEST_CASE("threshold estimation") {
    const std::vector<double> s{0.1, 0.2, 0.3, 0.9};
    CHECK(estimate_threshold(s, ThresholdStrategy::Median) == doctest::Approx(0.25));
    CHECK(estimate_threshold(s, ThresholdStrategy::Mean) == doctest::Approx(0.375));
    CHECK(estimate_threshold(s) == doctest::Approx(0.25));
    const std::vector<double> c{0.7, 0.7, 0.7};
    CHECK(estimate_threshold(c, ThresholdStrategy::Median) == 0.7);
    CHECK(estimate_threshold(c, ThresholdStrategy::Mean) == doctest::Approx(0.7));
    const std::vector<double> bad{-1.0, 0.0};
    CHECK_THROWS_AS(estimate_threshold(bad), EstimationError);
    CHECK_THROWS_AS(estimate_threshold(std::vector<double>{}), EstimationError);

    auto st = quant_stats(s, 4);
    CHECK(st.min == 0.1);
    CHECK(st.max == 0.9);
    CHECK(st.median >= st.min);
    CHECK(st.median <= st.max);
    std::size_t total = 0;
    for (auto h : st.histogram) total += h;
    CHECK(total == 4);
}

TEST_CASE("encode and decode hand values") {
    const SbqConfig c3{3, 1.0};
    CHECK(encode_feature(0.4, c3) == 1);
    CHECK(encode_feature(2.7, c3) == 5);
    CHECK(encode_feature(-0.2, c3) == 0);
    CHECK(encode_feature(1e9, c3) == 7);
    CHECK(decode_code(1, c3) == doctest::Approx(0.5));
    CHECK(decode_code(5, c3) == doctest::Approx(3.0));
    CHECK(decode_code(0, c3) == doctest::Approx(1.0 / 6.0));
    CHECK_THROWS_AS(decode_code(8, c3), DecodeError);
    CHECK_THROWS_AS(decode_code(-1, c3), DecodeError);

    const SbqConfig c1{1, 0.4};
    CHECK(encode_feature(0.4, c1) == 0);
    CHECK(encode_feature(0.41, c1) == 1);
    CHECK(decode_code(0, c1) == doctest::Approx(0.2));
    CHECK(decode_code(1, c1) == doctest::Approx(0.8));

    CHECK_THROWS_AS(encode_feature(0.1, SbqConfig{0, 1.0}), ConfigError);
    CHECK_THROWS_AS(encode_feature(0.1, SbqConfig{2, 0.0}), ConfigError);
}

TEST_CASE("bit packing is big-endian and framing is checked") {
    const std::vector<std::int64_t> codes{0, 1, 2, 3};
    CHECK(pack_codes(codes, 2) == Bits{0, 0, 0, 1, 1, 0, 1, 1});
    CHECK(unpack_codes(pack_codes(codes, 2), 2, 4) == codes);
    CHECK_THROWS_AS(unpack_codes(Bits(7), 2, 4), FramingError);

    const SbqConfig c3{3, 1.0};
    const std::vector<double> e{0.4, 2.7};
    auto enc = encode_embedding(e, c3);
    CHECK(enc.bits.size() == 6);
    CHECK(enc.codes.payload_len == 2);
    auto dec = decode_bits(enc.bits, c3, 2);
    CHECK(dec[0] == doctest::Approx(0.5));
    CHECK(dec[1] == doctest::Approx(3.0));
    CHECK_THROWS_AS(decode_bits(enc.bits, c3, 3), FramingError);

    Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        auto x = semra::testing::half_normal(64, kSourceScale, rng);
        for (int n = 1; n <= 4; ++n) {
            const SbqConfig cfg{n, 0.25};
            auto en = encode_embedding(x, cfg);
            REQUIRE(decode_bits(en.bits, cfg, x.size()) == decode_codes(en.codes.codes, cfg));
        }
    }
}

TEST_CASE("fuzz: code range, idempotence, monotonicity") {
    Rng rng(17);
    std::uniform_real_distribution<double> u(-1.0, 4.0);
    std::vector<double> xs(1000000);
    for (auto& x : xs) x = u(rng);
    for (int n = 1; n <= 3; ++n) {
        const SbqConfig cfg{n, 0.7};
        for (double x : xs) {
            const auto c = encode_feature(x, cfg);
            REQUIRE(c >= 0);
            REQUIRE(c <= pmax(n));
            REQUIRE(encode_feature(decode_code(c, cfg), cfg) == c);
        }
        std::vector<double> sorted(xs.begin(), xs.begin() + 100000);
        std::sort(sorted.begin(), sorted.end());
        std::int64_t prev = -1;
        for (double x : sorted) {
            const auto c = encode_feature(x, cfg);
            REQUIRE(c >= prev);
            prev = c;
        }
    }
}

TEST_CASE("uniform-region reconstruction error is bounded by half a bin") {
    for (int n = 2; n <= 4; ++n) {
        const SbqConfig cfg{n, 1.0};
        const double low = static_cast<double>(pmax(n - 1));
        const double hi = cfg.p_th * (1.0 - 1.0 / (2.0 * low));
        double worst = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const double p = hi * i / 9999.0;
            worst = std::max(worst, std::abs(quantize_feature(p, cfg) - p));
        }
        INFO("n = " << n);
        CHECK(worst <= cfg.p_th / (2.0 * low) + 1e-12);
        CHECK(worst > 0.9 * cfg.p_th / (2.0 * low));
    }
}

TEST_CASE("hybrid quantizer beats plain uniform on the half-normal source") {
    Rng rng(2024);
    auto xs = semra::testing::half_normal(100000, kSourceScale, rng);
    const double th = estimate_threshold(xs, ThresholdStrategy::Median);
    CHECK(th == doctest::Approx(0.25).epsilon(0.02));
    const double hi = *std::max_element(xs.begin(), xs.end());
    for (int n : {2, 3}) {
        INFO("n = " << n);
        CHECK(mse_sbq(xs, SbqConfig{n, th}) < mse_uniform(xs, n, hi));
    }
}

TEST_CASE("serial and OpenMP batch kernels agree exactly") {
    Rng rng(5);
    auto xs = semra::testing::half_normal(50000, kSourceScale, rng);
    const SbqConfig cfg{3, 0.25};
    std::vector<double> a(xs.size()), b(xs.size());
    kernels::serial::sbq_roundtrip(xs, a, cfg);
    kernels::parallel::sbq_roundtrip(xs, b, cfg);
    CHECK(a == b);
    for (std::size_t i = 0; i < xs.size(); i += 997) CHECK(a[i] == quantize_feature(xs[i], cfg));
    CHECK(kernels::serial::sbq_squared_error(xs, cfg) == kernels::parallel::sbq_squared_error(xs, cfg));
    CHECK(kernels::serial::sbq_squared_error(xs, cfg) / xs.size() == doctest::Approx(mse_sbq(xs, cfg)).epsilon(1e-9));
}
