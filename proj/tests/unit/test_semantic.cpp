#include <doctest.h>

#include <cmath>

#include "semra/common/errors.hpp"
#include "semra/phy/transport.hpp"
#include "semra/semantic/compensator.hpp"
#include "semra/semantic/source.hpp"

using namespace semra;
using namespace semra::semantic;
using ad::Array;

namespace {

SourceModel small_source(std::uint64_t seed, std::size_t users = 2) {
    Rng rng(seed);
    SourceConfig cfg;
    cfg.embedding_len = 16;
    cfg.catalog_size = 32;
    return make_source(cfg, users, rng);
}

std::vector<PipelineLink> links_for(std::size_t users, int n, double ber, double p_th = 0.25) {
    PipelineLink l;
    l.sbq = {n, p_th};
    l.gain = {1.0, 0.0};
    if (ber <= 0.0) {
        l.noise_var = 1e-30;
        l.mode = phy::TransportMode::MonteCarlo;
    } else {
        l.noise_var = 1.0 / phy::snr_for_ber(ber);
        l.mode = phy::TransportMode::AnalyticFlip;
    }
    return std::vector<PipelineLink>(users, l);
}

ad::AdamConfig comp_adam(double lr) {
    ad::AdamConfig c;
    c.learning_rate = lr;
    return c;
}

}  // namespace

TEST_CASE("source sampling: degenerate catalog, deterministic and fair weights") {
    Rng rng(1);
    auto one = source_from_catalog({{0.1, 0.2}}, {1.0});
    for (int i = 0; i < 100; ++i) CHECK(sample_source(one, 0, rng).values == std::vector<double>{0.1, 0.2});

    auto det = source_from_catalog({{1.0}, {2.0}}, {1.0, 0.0});
    for (int i = 0; i < 10000; ++i) REQUIRE(sample_source(det, 0, rng).item == 0);

    auto fair = source_from_catalog({{1.0}, {2.0}}, {0.5, 0.5});
    int zeros = 0;
    for (int i = 0; i < 10000; ++i) zeros += sample_source(fair, 0, rng).item == 0;
    CHECK(std::abs(zeros / 1e4 - 0.5) < 0.02);

    CHECK_THROWS_AS(source_from_catalog({{1.0}, {2.0}}, {0.5, 0.6}), ConfigError);
    CHECK_THROWS_AS(sample_source(fair, 1, rng), DimensionError);
}

TEST_CASE("generated catalogs are nonnegative, seeded and Zipf-weighted") {
    auto a = small_source(3);
    auto b = small_source(3);
    CHECK(a.catalogs == b.catalogs);
    for (const auto& cat : a.catalogs)
        for (const auto& item : cat)
            for (double x : item) CHECK(x >= 0.0);
    auto w = zipf_weights(4, 1.0);
    CHECK(w[0] == doctest::Approx(1.0 / (1 + 0.5 + 1.0 / 3 + 0.25)));
    CHECK(w[0] / w[1] == doctest::Approx(2.0));
}

TEST_CASE("similarity proxy") {
    const std::vector<double> e{0.3, 0.1, 0.7};
    CHECK(similarity_proxy(e, e) == doctest::Approx(1.0));
    CHECK(similarity_proxy(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 0.0);
    CHECK(similarity_proxy(std::vector<double>{1, 0}, std::vector<double>{1, 1}) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(similarity_proxy(std::vector<double>{1, 0}, std::vector<double>{-1, 0}) == 0.0);
    CHECK(similarity_proxy(std::vector<double>{0, 0}, std::vector<double>{0, 0}) == 1.0);
    CHECK_THROWS_AS(similarity_proxy(std::vector<double>{1}, std::vector<double>{1, 2}), DimensionError);
    for (double c : {1e-3, 0.5, 7.0, 1e4}) {
        std::vector<double> s = e;
        for (auto& x : s) x *= c;
        CHECK(similarity_proxy(e, s) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("loss_sn and loss_total hand values") {
    CHECK(loss_sn(Array::row({1.0, 0.0}), Array::row({1.0, 0.0})) == 0.0);
    CHECK(loss_sn(Array::row({1.0, 0.0}), Array::row({0.0, 0.0})) == 1.0);
    Array e(2, 2, std::vector<double>{1, 0, 0, 0});
    Array eh(2, 2, std::vector<double>{0, 0, std::sqrt(3.0), 0});
    CHECK(loss_sn(e, eh) == doctest::Approx(2.0));
    CHECK_THROWS_AS(loss_sn(Array(0, 2), Array(0, 2)), DomainError);

    CHECK(loss_total(0.0, 2.0, 0.1) == doctest::Approx(0.2));
    CHECK(loss_total(0.7, 5.0, 0.0) == 0.7);
    CHECK(loss_total(1.0, 0.0, 0.1) == 1.0);
    CHECK_THROWS_AS(loss_total(0.0, 1.0, 1.5), ConfigError);

    Rng rng(2);
    for (int i = 0; i < 50; ++i) {
        Array a(3, 4), b(3, 4);
        std::normal_distribution<double> g;
        for (auto& x : a.values()) x = g(rng);
        for (auto& x : b.values()) x = g(rng);
        CHECK(loss_sn(a, b) > 0.0);
        CHECK(loss_sn(a, a) == 0.0);
    }
}

TEST_CASE("zero-initialised compensator is the identity and pure") {
    Rng rng(4);
    auto p = make_compensator(16, 32, rng);
    Array x(3, 16);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& v : x.values()) v = u(rng);
    CHECK(compensate(x, p) == x);

    p.layers.back().weight.fill(0.01);
    CHECK(compensate(x, p) == compensate(x, p));
    CHECK_FALSE(compensate(x, p) == x);
}

TEST_CASE("compensator learns a constant offset and generalises to held-out items") {
    Rng rng(5);
    SourceConfig cfg;
    cfg.embedding_len = 16;
    cfg.catalog_size = 512;
    auto src = make_source(cfg, 1, rng);
    auto p = make_compensator(16, 64, rng);
    auto adam = ad::make_adam(p, comp_adam(2e-3));
    auto batch_from = [&](std::size_t first, std::size_t count) {
        Array e(count, 16), rx(count, 16);
        for (std::size_t r = 0; r < count; ++r)
            for (std::size_t j = 0; j < 16; ++j) {
                e(r, j) = src.catalogs[0][first + r][j];
                rx(r, j) = e(r, j) - 0.1;
            }
        return std::pair{e, rx};
    };
    std::uniform_int_distribution<std::size_t> pick(0, 383);
    for (int step = 0; step < 1500; ++step) {
        auto [e, rx] = batch_from(pick(rng), 32);
        compensator_step(p, adam, e, rx);
    }
    auto [e, rx] = batch_from(416, 96);  // items never used in training
    Array out = compensate(rx, p);
    double worst = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) worst = std::max(worst, std::abs(out[i] - e[i]));
    CHECK(worst < 0.02);
}

TEST_CASE("compensator training epochs: progress, zero lr, determinism") {
    auto src = small_source(6);
    auto links = links_for(2, 3, 0.0);
    EpochConfig ec{200, 8};

    Rng init(7);
    auto p = make_compensator(16, 64, init);
    auto adam = ad::make_adam(p, comp_adam(2e-3));
    Rng rng(8);
    auto res = train_compensator_epoch(src, p, adam, links, ec, rng);
    const double first = res.batch_losses.front();
    double tail = 0.0;
    for (std::size_t i = 190; i < 200; ++i) tail += res.batch_losses[i];
    CHECK(tail / 10.0 < 0.5 * first);

    Rng init2(7);
    auto frozen = make_compensator(16, 64, init2);
    auto before = frozen;
    auto adam0 = ad::make_adam(frozen, comp_adam(0.0));
    Rng rng2(8);
    auto flat = train_compensator_epoch(src, frozen, adam0, links, EpochConfig{20, 8}, rng2);
    CHECK(frozen == before);
    for (std::size_t i = 1; i < flat.batch_losses.size(); ++i) CHECK(flat.batch_losses[i] >= 0.0);

    auto replay = [&] {
        Rng i3(7);
        auto q = make_compensator(16, 64, i3);
        auto a = ad::make_adam(q, comp_adam(2e-3));
        Rng r(8);
        return train_compensator_epoch(src, q, a, links, EpochConfig{30, 8}, r).batch_losses;
    };
    CHECK(replay() == replay());
}

TEST_CASE("pipeline tuning: zero objective, equivalence, blocked straight-through") {
    auto src = small_source(9);
    auto links = links_for(2, 3, 0.0);

    Rng i1(10);
    auto p = make_compensator(16, 64, i1);
    p.layers.back().weight.fill(0.01);
    auto before = p;
    auto adam = ad::make_adam(p, comp_adam(2e-3));
    Rng r1(11);
    TuneConfig zero;
    zero.epoch = {5, 8};
    zero.weight = 0.0;
    tune_pipeline_epoch(src, p, adam, links, zero, r1);
    CHECK(p == before);

    auto run_train = [&] {
        Rng i(12);
        auto q = make_compensator(16, 64, i);
        auto a = ad::make_adam(q, comp_adam(2e-3));
        Rng r(13);
        auto res = train_compensator_epoch(src, q, a, links, EpochConfig{25, 8}, r);
        return std::pair{res.batch_losses, q};
    };
    auto run_tune = [&] {
        Rng i(12);
        auto q = make_compensator(16, 64, i);
        auto a = ad::make_adam(q, comp_adam(2e-3));
        Rng r(13);
        TuneConfig tc;
        tc.epoch = {25, 8};
        tc.weight = 1.0;
        auto res = tune_pipeline_epoch(src, q, a, links, tc, r);
        return std::pair{res.batch_losses, q};
    };
    auto [lt, pt] = run_train();
    auto [lu, pu] = run_tune();
    CHECK(lt == lu);
    CHECK(pt == pu);

    Rng i3(14);
    auto q = make_compensator(16, 64, i3);
    q.layers.back().weight.fill(0.02);
    auto a3 = ad::make_adam(q, comp_adam(2e-3));
    TuneConfig blocked;
    blocked.epoch = {3, 8};
    blocked.weight = 1.0;
    blocked.st_gain = 0.0;
    Rng r3(15);
    CHECK(tune_pipeline_epoch(src, q, a3, links, blocked, r3).source_grad_norm == 0.0);
    blocked.st_gain = 1.0;
    CHECK(tune_pipeline_epoch(src, q, a3, links, blocked, r3).source_grad_norm > 0.0);
}

TEST_CASE("similarity degrades with BER and improves with more bits") {
    Rng rng(16);
    SourceConfig cfg;
    auto src = make_source(cfg, 1, rng);
    auto mean_similarity = [&](int n, double ber) {
        Rng r(17);
        auto link = links_for(1, n, ber)[0];
        double acc = 0.0;
        for (int i = 0; i < 1000; ++i) {
            auto item = sample_source(src, 0, r);
            auto rx = transmit_embedding(item.values, link, r);
            acc += similarity_proxy(item.values, rx.values);
        }
        return acc / 1000.0;
    };
    double prev = 2.0;
    for (double ber : {0.0, 0.01, 0.05, 0.1, 0.3}) {
        const double s = mean_similarity(3, ber);
        INFO("ber " << ber);
        CHECK(s <= prev);
        prev = s;
    }
    CHECK(mean_similarity(3, 0.0) >= mean_similarity(2, 0.0));
    CHECK(mean_similarity(2, 0.0) >= mean_similarity(1, 0.0));
}
