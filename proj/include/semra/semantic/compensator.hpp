#pragma once

// Receiver-side residual offset compensator, its training losses, and the
// toy-scale compensator training / pipeline tuning epochs.

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "semra/autodiff/adam.hpp"
#include "semra/autodiff/mlp.hpp"
#include "semra/autodiff/tape.hpp"
#include "semra/phy/transport.hpp"
#include "semra/sbq/codec.hpp"
#include "semra/semantic/source.hpp"

namespace semra::semantic {

using CompensatorParams = ad::MlpParams;

// Dense(hidden, relu) -> Dense(len, linear) with the final layer zeroed, so
// the residual output starts as the identity.
CompensatorParams make_compensator(std::size_t embedding_len, std::size_t hidden, Rng& rng);

// Rows are embeddings: e_hat = e_rx + MLP(e_rx).
ad::Array compensate(const ad::Array& received, const CompensatorParams& params);
ad::Var compensate(const CompensatorParams& params, const ad::MlpBinding& binding, ad::Var received);

// (1/rows) * sum of squared row distances. Throws DomainError on empty input.
double loss_sn(const ad::Array& e, const ad::Array& e_hat);
ad::Var loss_sn(ad::Var e, ad::Var e_hat);

// l_se + weight * l_sn; throws ConfigError unless weight is in [0, 1].
double loss_total(double l_se, double l_sn, double weight);

// How one user's payload crosses the air interface.
struct PipelineLink {
    sbq::SbqConfig sbq;
    std::complex<double> gain{1.0, 0.0};
    double noise_var = 0.01;
    phy::TransportMode mode = phy::TransportMode::MonteCarlo;
};

struct Received {
    std::vector<double> values;  // decoded, before compensation
    std::size_t bits = 0;
    bool no_signal = false;
};

// Quantize, pack, transport, unpack and decode one embedding.
Received transmit_embedding(std::span<const double> e, const PipelineLink& link, Rng& rng);

struct EpochConfig {
    std::size_t batches = 1;
    std::size_t items_per_user = 8;
};

// Optional reconstruction term; receives the source and compensated batches.
using ReconstructionLoss = std::function<ad::Var(ad::Tape&, ad::Var e, ad::Var e_hat)>;

struct TuneConfig {
    EpochConfig epoch;
    double weight = 0.1;         // weight on the compensator loss
    double st_gain = 1.0;        // straight-through gain across quantizer + channel
    ReconstructionLoss l_se;     // empty means zero
};

struct EpochResult {
    double mean_loss = 0.0;
    std::vector<double> batch_losses;  // before each update
    double source_grad_norm = 0.0;     // last batch, gradient reaching the source embeddings
};

// One Adam step on loss_sn(source, compensate(received)); returns the loss
// before the update.
double compensator_step(CompensatorParams& params, ad::AdamState& adam, const ad::Array& source,
                        const ad::Array& received);

// One row per (user, item). links.size() must equal the model's user count.
EpochResult train_compensator_epoch(const SourceModel& model, CompensatorParams& params, ad::AdamState& adam,
                                    const std::vector<PipelineLink>& links, const EpochConfig& cfg, Rng& rng);

// Same sampling and transport, optimising loss_total with the source batch
// connected to the received batch by a straight-through node.
EpochResult tune_pipeline_epoch(const SourceModel& model, CompensatorParams& params, ad::AdamState& adam,
                                const std::vector<PipelineLink>& links, const TuneConfig& cfg, Rng& rng);

}  // namespace semra::semantic
