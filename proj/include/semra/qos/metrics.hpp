#pragma once

// Semantic quality-of-service metrics: quantization efficiency, latency,
// validity gating, the aggregate score and the shaped reward.

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace semra::qos {

inline constexpr double kInfiniteLatency = std::numeric_limits<double>::infinity();

struct QosWeights {
    double phi_g = 1.0;           // latency weight in the aggregate score
    double omega_im = 1.0;        // similarity punishment weight
    double omega_g = 10.0;        // latency punishment weight
    double bonus = 3.0;           // r-ring: reward for a satisfied constraint
    double im_th = 0.95;          // similarity threshold
    double g_th = 5e-3;           // latency threshold, seconds
    double latency_scale = 64.0;  // bits-per-feature multiplier in the latency formula
    // Latency entering the score and the shortfall is capped at this multiple
    // of g_th so a dead link stays finite.
    double latency_cap = 10.0;
    // Use the piecewise punishments exactly as printed (bonus on latency
    // violation, positive similarity shortfall) instead of the intended form.
    bool literal_punishments = false;

    void validate() const;
};

// Im / n. Throws DomainError for n < 1.
double sqe(double similarity, int n);
// scale * n / rate; kInfiniteLatency when rate <= 0.
double latency(int n, double rate, double scale);
bool validity(double similarity, double im_th);
double effective_sqe(double similarity, double sqe_value, double im_th);
// sum_u (eff_u - phi_g * lat_u). Throws DimensionError on length mismatch.
double sc_qos(std::span<const double> effective_sqe, std::span<const double> latency, double phi_g);

double punish_similarity(double similarity, const QosWeights& w);
double punish_latency(double latency_s, const QosWeights& w);
// min(latency, latency_cap * g_th).
double capped_latency(double latency_s, const QosWeights& w);

struct UserMetrics {
    int n = 1;
    std::size_t subchannel = 0;
    double bandwidth = 0.0;
    double snr = 0.0;
    double rate = 0.0;
    double similarity = 0.0;      // mean over the step's items
    double sqe = 0.0;             // similarity / n
    double effective_sqe = 0.0;   // mean over items of validity * Im / n
    double valid_fraction = 0.0;  // share of items meeting im_th
    double latency = 0.0;         // seconds, may be kInfiniteLatency
    double punish_similarity = 0.0;
    double punish_latency = 0.0;
};

struct MetricsSnapshot {
    std::vector<UserMetrics> users;
    double sc_qos = 0.0;
    double reward = 0.0;
};

// Per-item similarities for one user at level n over a link of rate `rate`.
UserMetrics user_metrics(std::span<const double> item_similarities, int n, double rate, const QosWeights& w);

// Fills sc_qos and reward from the per-user entries.
void finalize(MetricsSnapshot& s, const QosWeights& w);
// psi + omega_im * sum P_im + omega_g * sum P_g.
double reward(const MetricsSnapshot& s, const QosWeights& w);

}  // namespace semra::qos
