#pragma once

// Synthetic semantic source: per-user catalogs of fixed nonnegative
// embeddings drawn once from a half-normal law, sampled with Zipf weights.

#include <cstddef>
#include <span>
#include <vector>

#include "semra/common/rng.hpp"

namespace semra::semantic {

struct SourceConfig {
    std::size_t embedding_len = 64;
    std::size_t catalog_size = 256;
    double zipf_exponent = 1.0;
    double scale = 0.37065;  // half-normal scale with median ~0.25

    void validate() const;
};

struct SemanticEmbedding {
    std::vector<double> values;
    std::size_t user = 0;
    std::size_t item = 0;
};

struct SourceModel {
    std::size_t embedding_len = 0;
    double scale = 0.0;
    std::vector<std::vector<std::vector<double>>> catalogs;  // [user][item][feature]
    std::vector<double> weights;                            // shared item probabilities
    std::vector<double> cumulative;

    std::size_t users() const noexcept { return catalogs.size(); }
    std::size_t catalog_size() const noexcept { return weights.size(); }
    // Throws ConfigError on an empty catalog, ragged embeddings, negative
    // weights or weights that do not sum to 1 (within 1e-9).
    void validate() const;
};

SourceModel make_source(const SourceConfig& cfg, std::size_t users, Rng& rng);
// Builds a single-user model from explicit items and weights.
SourceModel source_from_catalog(std::vector<std::vector<double>> items, std::vector<double> weights);

std::vector<double> zipf_weights(std::size_t n, double exponent);

SemanticEmbedding sample_source(const SourceModel& model, std::size_t user, Rng& rng);

// Cosine of the two embeddings clamped at 0; two zero vectors score 1.
double similarity_proxy(std::span<const double> e, std::span<const double> e_hat);

}  // namespace semra::semantic
