#include "semra/qos/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "semra/common/errors.hpp"

namespace semra::qos {

void QosWeights::validate() const {
    auto nonneg = [](double v, const char* field) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(field, "must be finite and non-negative");
    };
    nonneg(phi_g, "qos.phi_g");
    nonneg(omega_im, "qos.omega_im");
    nonneg(omega_g, "qos.omega_g");
    nonneg(bonus, "qos.bonus");
    nonneg(latency_scale, "qos.latency_scale");
    if (!(im_th >= 0.0 && im_th <= 1.0)) throw ConfigError("qos.im_th", "must be in [0, 1]");
    if (!(g_th > 0.0) || !std::isfinite(g_th)) throw ConfigError("qos.g_th", "must be positive");
    if (!(latency_cap >= 1.0) || !std::isfinite(latency_cap)) throw ConfigError("qos.latency_cap", "must be at least 1");
}

double sqe(double similarity, int n) {
    if (n < 1) throw DomainError("sqe: bits per feature must be at least 1");
    return similarity / static_cast<double>(n);
}

double latency(int n, double rate, double scale) {
    if (!(rate > 0.0)) return kInfiniteLatency;
    return scale * static_cast<double>(n) / rate;
}

bool validity(double similarity, double im_th) { return similarity >= im_th; }

double effective_sqe(double similarity, double sqe_value, double im_th) {
    return validity(similarity, im_th) ? sqe_value : 0.0;
}

double sc_qos(std::span<const double> eff, std::span<const double> lat, double phi_g) {
    if (eff.size() != lat.size()) throw DimensionError("sc_qos: user counts differ");
    double psi = 0.0;
    for (std::size_t u = 0; u < eff.size(); ++u) psi += eff[u] - phi_g * lat[u];
    return psi;
}

double capped_latency(double latency_s, const QosWeights& w) { return std::min(latency_s, w.latency_cap * w.g_th); }

double punish_similarity(double similarity, const QosWeights& w) {
    if (similarity >= w.im_th) return w.bonus;
    return w.literal_punishments ? w.im_th - similarity : -(w.im_th - similarity);
}

double punish_latency(double latency_s, const QosWeights& w) {
    const double g = capped_latency(latency_s, w);
    if (w.literal_punishments) return latency_s >= w.g_th ? w.bonus : w.g_th - g;
    if (latency_s <= w.g_th) return w.bonus;
    return -(g - w.g_th) / w.g_th;
}

UserMetrics user_metrics(std::span<const double> sims, int n, double rate, const QosWeights& w) {
    if (sims.empty()) throw DomainError("user_metrics: no items");
    UserMetrics m;
    m.n = n;
    m.rate = rate;
    double sim = 0.0, eff = 0.0, valid = 0.0;
    for (double s : sims) {
        sim += s;
        const double q = sqe(s, n);
        eff += effective_sqe(s, q, w.im_th);
        valid += validity(s, w.im_th) ? 1.0 : 0.0;
    }
    const double k = static_cast<double>(sims.size());
    m.similarity = sim / k;
    m.sqe = sqe(m.similarity, n);
    m.effective_sqe = eff / k;
    m.valid_fraction = valid / k;
    m.latency = latency(n, rate, w.latency_scale);
    m.punish_similarity = punish_similarity(m.similarity, w);
    m.punish_latency = punish_latency(m.latency, w);
    return m;
}

double reward(const MetricsSnapshot& s, const QosWeights& w) {
    double p_im = 0.0, p_g = 0.0;
    for (const auto& u : s.users) {
        p_im += u.punish_similarity;
        p_g += u.punish_latency;
    }
    return s.sc_qos + w.omega_im * p_im + w.omega_g * p_g;
}

void finalize(MetricsSnapshot& s, const QosWeights& w) {
    std::vector<double> eff, lat;
    for (const auto& u : s.users) {
        eff.push_back(u.effective_sqe);
        lat.push_back(capped_latency(u.latency, w));
    }
    s.sc_qos = sc_qos(eff, lat, w.phi_g);
    s.reward = reward(s, w);
}

}  // namespace semra::qos
