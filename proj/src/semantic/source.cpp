#include "semra/semantic/source.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "semra/common/errors.hpp"

namespace semra::semantic {

void SourceConfig::validate() const {
    if (embedding_len == 0) throw ConfigError("semantic.embedding_len", "must be positive");
    if (catalog_size == 0) throw ConfigError("semantic.catalog_size", "must be positive");
    if (!(zipf_exponent >= 0.0)) throw ConfigError("semantic.zipf_exponent", "must be non-negative");
    if (!(scale > 0.0)) throw ConfigError("semantic.source_scale", "must be positive");
}

void SourceModel::validate() const {
    if (catalogs.empty() || weights.empty()) throw ConfigError("semantic", "empty source catalog");
    if (!(scale > 0.0)) throw ConfigError("semantic.source_scale", "must be positive");
    for (const auto& cat : catalogs) {
        if (cat.size() != weights.size()) throw ConfigError("semantic", "catalog size differs from weight count");
        for (const auto& item : cat)
            if (item.size() != embedding_len) throw ConfigError("semantic", "ragged catalog embeddings");
    }
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw ConfigError("semantic", "negative item weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("semantic", "item weights sum to " + std::to_string(total));
}

std::vector<double> zipf_weights(std::size_t n, double exponent) {
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = std::pow(static_cast<double>(k + 1), -exponent);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) x /= total;
    return w;
}

namespace {

std::vector<double> cumulate(const std::vector<double>& w) {
    std::vector<double> c(w.size());
    std::partial_sum(w.begin(), w.end(), c.begin());
    if (!c.empty()) c.back() = 1.0;
    return c;
}

}  // namespace

SourceModel make_source(const SourceConfig& cfg, std::size_t users, Rng& rng) {
    cfg.validate();
    if (users == 0) throw ConfigError("system.users", "must be positive");
    SourceModel m;
    m.embedding_len = cfg.embedding_len;
    m.scale = cfg.scale;
    std::normal_distribution<double> g(0.0, cfg.scale);
    m.catalogs.assign(users, {});
    for (auto& cat : m.catalogs) {
        cat.assign(cfg.catalog_size, std::vector<double>(cfg.embedding_len));
        for (auto& item : cat)
            for (auto& x : item) x = std::abs(g(rng));
    }
    m.weights = zipf_weights(cfg.catalog_size, cfg.zipf_exponent);
    m.cumulative = cumulate(m.weights);
    return m;
}

SourceModel source_from_catalog(std::vector<std::vector<double>> items, std::vector<double> weights) {
    SourceModel m;
    m.embedding_len = items.empty() ? 0 : items.front().size();
    m.scale = 1.0;
    m.catalogs.push_back(std::move(items));
    m.weights = std::move(weights);
    m.validate();
    m.cumulative = cumulate(m.weights);
    return m;
}

SemanticEmbedding sample_source(const SourceModel& model, std::size_t user, Rng& rng) {
    if (user >= model.users()) throw DimensionError("sample_source: user " + std::to_string(user) + " out of range");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double x = u(rng);
    auto it = std::upper_bound(model.cumulative.begin(), model.cumulative.end(), x);
    std::size_t item = static_cast<std::size_t>(it - model.cumulative.begin());
    item = std::min(item, model.catalog_size() - 1);
    // Skip zero-weight items that upper_bound can land on at a plateau edge.
    while (model.weights[item] == 0.0 && item + 1 < model.catalog_size()) ++item;
    return {model.catalogs[user][item], user, item};
}

double similarity_proxy(std::span<const double> e, std::span<const double> e_hat) {
    if (e.size() != e_hat.size()) throw DimensionError("similarity_proxy: embedding lengths differ");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        dot += e[i] * e_hat[i];
        na += e[i] * e[i];
        nb += e_hat[i] * e_hat[i];
    }
    if (na == 0.0 && nb == 0.0) return 1.0;
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

}  // namespace semra::semantic
