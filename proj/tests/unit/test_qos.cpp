#include <doctest.h>

#include <cmath>

#include "semra/common/errors.hpp"
#include "semra/phy/link.hpp"
#include "semra/qos/metrics.hpp"

using namespace semra;
using namespace semra::qos;

namespace {

QosWeights table_weights(double im_th = 0.8) {
    QosWeights w;
    w.im_th = im_th;
    w.phi_g = 1.0;
    return w;
}

UserMetrics with_punishments(double p_im, double p_g) {
    UserMetrics u;
    u.punish_similarity = p_im;
    u.punish_latency = p_g;
    return u;
}

}  // namespace

TEST_CASE("sqe hand values and monotonicity") {
    CHECK(sqe(0.9, 3) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(sqe(0.0, 2) == 0.0);
    CHECK(sqe(0.8, 1) > sqe(0.8, 2));
    CHECK(sqe(0.8, 2) > sqe(0.8, 3));
    CHECK(sqe(0.8, 3) == doctest::Approx(0.26667).epsilon(1e-4));
    CHECK_THROWS_AS(sqe(0.5, 0), DomainError);
    for (int i = 1; i <= 100; ++i)
        for (int n = 1; n < 6; ++n) CHECK(sqe(i / 100.0, n) > sqe(i / 100.0, n + 1));
}

TEST_CASE("latency hand values and sentinel") {
    CHECK(std::abs(latency(3, 120000.0, 1.0) - 2.5e-5) < 1e-9);
    CHECK(latency(3, 120000.0, 64.0) == doctest::Approx(1.6e-3));
    CHECK(latency(3, 1e18, 64.0) < 1e-15);
    CHECK(std::isinf(latency(3, 0.0, 64.0)));
}

TEST_CASE("validity gate over a 100-point grid") {
    CHECK(effective_sqe(0.9, 0.3, 0.8) == 0.3);
    CHECK(effective_sqe(0.7, 0.35, 0.8) == 0.0);
    CHECK(validity(0.8, 0.8));
    for (int i = 0; i < 100; ++i) {
        const double im = i / 99.0;
        const double q = sqe(im, 2);
        CHECK(effective_sqe(im, q, 0.55) == (im < 0.55 ? 0.0 : q));
    }
}

TEST_CASE("sc_qos hand value, degenerate cases, additivity") {
    const double eff[] = {0.3};
    const double lat[] = {2.5e-5};
    CHECK(std::abs(sc_qos(eff, lat, 1.0) - 0.299975) < 1e-9);
    const double z[] = {0.0, 0.0};
    CHECK(sc_qos(z, z, 1.0) == 0.0);
    const double e3[] = {0.1, 0.2, 0.3};
    const double l3[] = {1.0, 2.0, 3.0};
    CHECK(sc_qos(e3, l3, 0.0) == doctest::Approx(0.6));
    CHECK(sc_qos(e3, l3, 0.7) == doctest::Approx(sc_qos(std::span(e3, 1), std::span(l3, 1), 0.7) +
                                                  sc_qos(std::span(e3 + 1, 2), std::span(l3 + 1, 2), 0.7)));
    CHECK_THROWS_AS(sc_qos(std::span(e3, 2), l3, 1.0), DimensionError);
}

TEST_CASE("punishments: intended and literal forms") {
    auto w = table_weights();
    CHECK(punish_similarity(0.9, w) == 3.0);
    CHECK(punish_similarity(0.6, w) == doctest::Approx(-0.2));
    CHECK(punish_latency(w.g_th, w) == 3.0);
    CHECK(punish_latency(2.0 * w.g_th, w) == doctest::Approx(-1.0));
    CHECK(punish_latency(kInfiniteLatency, w) == doctest::Approx(-(w.latency_cap - 1.0)));

    w.literal_punishments = true;
    CHECK(punish_similarity(0.6, w) == doctest::Approx(0.2));
    CHECK(punish_latency(2.0 * w.g_th, w) == 3.0);
    CHECK(punish_latency(0.5 * w.g_th, w) == doctest::Approx(0.5 * w.g_th));
}

TEST_CASE("reward decomposition hand values") {
    auto w = table_weights();
    MetricsSnapshot s;
    s.sc_qos = 0.3;
    s.users = {with_punishments(3, 3), with_punishments(3, 3), with_punishments(3, 3)};
    CHECK(std::abs(reward(s, w) - 99.3) < 1e-9);

    s.sc_qos = 0.0;
    CHECK(reward(s, w) == (w.omega_im + w.omega_g) * 3 * w.bonus);

    MetricsSnapshot mixed;
    mixed.users = {with_punishments(punish_similarity(0.6, w), 3), with_punishments(3, 3)};
    CHECK(std::abs(reward(mixed, w) - 62.8) < 1e-9);
}

TEST_CASE("snapshot assembly reproduces the reward from its parts bit-exactly") {
    auto w = table_weights(0.9);
    MetricsSnapshot s;
    const double a[] = {0.95, 0.97, 0.85, 0.99};
    const double b[] = {0.5, 0.7};
    s.users.push_back(user_metrics(a, 2, 80000.0, w));
    s.users.push_back(user_metrics(b, 1, 0.0, w));
    finalize(s, w);
    CHECK(s.users[0].valid_fraction == 0.75);
    CHECK(s.users[0].effective_sqe == doctest::Approx((0.95 + 0.97 + 0.99) / 2.0 / 4.0));
    CHECK(s.users[1].effective_sqe == 0.0);
    CHECK(std::isinf(s.users[1].latency));
    CHECK(std::isfinite(s.reward));
    double psi = 0.0, pim = 0.0, pg = 0.0;
    for (const auto& u : s.users) {
        psi += u.effective_sqe - w.phi_g * capped_latency(u.latency, w);
        pim += u.punish_similarity;
        pg += u.punish_latency;
    }
    CHECK(s.sc_qos == psi);
    CHECK(s.reward == psi + w.omega_im * pim + w.omega_g * pg);
}

TEST_CASE("rate example feeds the latency and score examples") {
    std::vector<phy::cd> h{phy::cd(std::sqrt(0.15), 0.0)}, f{phy::cd(1.0, 0.0)};
    const double rate = phy::transmission_rate(30000.0, h, f, 0.01);
    CHECK(std::abs(rate - 120000.0) < 1e-9);
    const double lat = latency(3, rate, 1.0);
    const double eff[] = {effective_sqe(0.9, sqe(0.9, 3), 0.8)};
    const double l[] = {lat};
    CHECK(std::abs(sc_qos(eff, l, 1.0) - 0.299975) < 1e-9);
}
