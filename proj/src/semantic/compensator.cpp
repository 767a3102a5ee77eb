#include "semra/semantic/compensator.hpp"

#include <cmath>
#include <string>

#include "semra/common/errors.hpp"

namespace semra::semantic {

CompensatorParams make_compensator(std::size_t embedding_len, std::size_t hidden, Rng& rng) {
    const std::size_t sizes[] = {embedding_len, hidden, embedding_len};
    CompensatorParams p = ad::make_mlp(sizes, ad::Activation::Relu, ad::Activation::Linear, rng);
    p.layers.back().weight.fill(0.0);
    p.layers.back().bias.fill(0.0);
    return p;
}

ad::Array compensate(const ad::Array& received, const CompensatorParams& params) {
    ad::Array out = ad::evaluate(params, received);
    if (!out.same_shape(received)) throw DimensionError("compensate: compensator output shape differs from input");
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += received[i];
    return out;
}

ad::Var compensate(const CompensatorParams& params, const ad::MlpBinding& binding, ad::Var received) {
    return ad::add(received, ad::forward(params, binding, received));
}

double loss_sn(const ad::Array& e, const ad::Array& e_hat) {
    if (e.rows() == 0) throw DomainError("loss_sn: empty batch");
    if (!e.same_shape(e_hat)) throw DimensionError("loss_sn: batch shapes differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        const double d = e[i] - e_hat[i];
        acc += d * d;
    }
    return acc / static_cast<double>(e.rows());
}

ad::Var loss_sn(ad::Var e, ad::Var e_hat) {
    const std::size_t rows = e.tape->value(e).rows();
    if (rows == 0) throw DomainError("loss_sn: empty batch");
    return ad::scale(ad::sum(ad::square(ad::sub(e, e_hat))), 1.0 / static_cast<double>(rows));
}

double loss_total(double l_se, double l_sn, double weight) {
    if (!(weight >= 0.0 && weight <= 1.0)) throw ConfigError("semantic.loss_weight", "must be in [0, 1]");
    return l_se + weight * l_sn;
}

Received transmit_embedding(std::span<const double> e, const PipelineLink& link, Rng& rng) {
    auto enc = sbq::encode_embedding(e, link.sbq);
    auto rx = phy::transport_bits(enc.bits, link.gain, link.noise_var, link.mode, rng);
    return {sbq::decode_bits(rx.bits, link.sbq, e.size()), enc.bits.size(), rx.no_signal};
}

namespace {

struct Batch {
    ad::Array source;
    ad::Array received;
};

Batch draw_batch(const SourceModel& model, const std::vector<PipelineLink>& links, std::size_t items_per_user,
                 Rng& rng) {
    if (links.size() != model.users())
        throw DimensionError("compensator epoch: " + std::to_string(links.size()) + " links for " +
                             std::to_string(model.users()) + " users");
    if (items_per_user == 0) throw ConfigError("semantic.items_per_user", "must be positive");
    const std::size_t rows = model.users() * items_per_user;
    const std::size_t len = model.embedding_len;
    Batch b{ad::Array(rows, len), ad::Array(rows, len)};
    std::size_t r = 0;
    for (std::size_t k = 0; k < items_per_user; ++k)
        for (std::size_t u = 0; u < model.users(); ++u, ++r) {
            auto item = sample_source(model, u, rng);
            auto rx = transmit_embedding(item.values, links[u], rng);
            std::copy(item.values.begin(), item.values.end(), b.source.row_span(r).begin());
            std::copy(rx.values.begin(), rx.values.end(), b.received.row_span(r).begin());
        }
    return b;
}

EpochResult run_epoch(const SourceModel& model, CompensatorParams& params, ad::AdamState& adam,
                      const std::vector<PipelineLink>& links, const EpochConfig& epoch, const TuneConfig* tune,
                      Rng& rng) {
    if (epoch.batches == 0) throw ConfigError("semantic.compensator_batches", "must be positive");
    EpochResult res;
    for (std::size_t i = 0; i < epoch.batches; ++i) {
        Batch b = draw_batch(model, links, epoch.items_per_user, rng);
        ad::Tape t;
        auto binding = ad::bind(t, params, true);
        ad::Var target = t.constant(b.source);
        ad::Var loss;
        ad::Var source_leaf;
        if (tune) {
            source_leaf = t.leaf(b.source);
            ad::Var rx = ad::straight_through(source_leaf, b.received, tune->st_gain);
            ad::Var e_hat = compensate(params, binding, rx);
            loss = ad::scale(loss_sn(target, e_hat), tune->weight);
            if (tune->l_se) loss = ad::add(tune->l_se(t, target, e_hat), loss);
        } else {
            ad::Var e_hat = compensate(params, binding, t.constant(b.received));
            loss = loss_sn(target, e_hat);
        }
        const double value = t.value(loss).item();
        if (!std::isfinite(value)) throw TrainingError("compensator: non-finite loss");
        res.batch_losses.push_back(value);
        t.backward(loss);
        if (tune) {
            double n2 = 0.0;
            for (double g : t.grad(source_leaf).values()) n2 += g * g;
            res.source_grad_norm = std::sqrt(n2);
        }
        ad::adam_step(params, ad::gradients(t, binding), adam, "compensator");
    }
    double total = 0.0;
    for (double l : res.batch_losses) total += l;
    res.mean_loss = total / static_cast<double>(res.batch_losses.size());
    return res;
}

}  // namespace

double compensator_step(CompensatorParams& params, ad::AdamState& adam, const ad::Array& source,
                        const ad::Array& received) {
    ad::Tape t;
    auto binding = ad::bind(t, params, true);
    ad::Var loss = loss_sn(t.constant(source), compensate(params, binding, t.constant(received)));
    const double value = t.value(loss).item();
    if (!std::isfinite(value)) throw TrainingError("compensator: non-finite loss");
    t.backward(loss);
    ad::adam_step(params, ad::gradients(t, binding), adam, "compensator");
    return value;
}

EpochResult train_compensator_epoch(const SourceModel& model, CompensatorParams& params, ad::AdamState& adam,
                                    const std::vector<PipelineLink>& links, const EpochConfig& cfg, Rng& rng) {
    return run_epoch(model, params, adam, links, cfg, nullptr, rng);
}

EpochResult tune_pipeline_epoch(const SourceModel& model, CompensatorParams& params, ad::AdamState& adam,
                                const std::vector<PipelineLink>& links, const TuneConfig& cfg, Rng& rng) {
    if (!(cfg.weight >= 0.0 && cfg.weight <= 1.0)) throw ConfigError("semantic.loss_weight", "must be in [0, 1]");
    if (!std::isfinite(cfg.st_gain)) throw ConfigError("semantic.st_gain", "must be finite");
    return run_epoch(model, params, adam, links, cfg.epoch, &cfg, rng);
}

}  // namespace semra::semantic
