#pragma once

// Hybrid uniform / outlier quantizer for nonnegative semantic features.
//
// With P(k) = 2^k - 1, values in [0, p_th] fall into P(n-1) equal bins
// (codes 0..P(n-1) - 1, reconstructed at bin midpoints, with p_th itself on
// code P(n-1)); values above p_th take codes P(n-1)..P(n) in steps of p_th,
// rounded half away from zero.
// Codes are packed big-endian, n bits each, in feature order.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace semra::sbq {

using Bits = std::vector<std::uint8_t>;

struct SbqConfig {
    int n = 3;
    double p_th = 0.25;

    void validate() const;
};

// 2^k - 1.
constexpr std::int64_t pmax(int k) noexcept { return (std::int64_t{1} << k) - 1; }

enum class ThresholdStrategy { Median, Mean };

struct QuantStats {
    double mean = 0.0;
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::vector<std::size_t> histogram;  // equal-width bins over [min, max]
};

QuantStats quant_stats(std::span<const double> samples, std::size_t bins = 32);

// Throws EstimationError for an empty sample or one with no positive value.
double estimate_threshold(std::span<const double> samples, ThresholdStrategy strategy = ThresholdStrategy::Median);

std::int64_t encode_feature(double p, const SbqConfig& cfg);
// Throws DecodeError when code is outside [0, 2^n - 1].
double decode_code(std::int64_t code, const SbqConfig& cfg);

struct CodeVector {
    std::vector<std::int64_t> codes;
    int n = 0;
    std::size_t payload_len = 0;
};

struct EncodedEmbedding {
    CodeVector codes;
    Bits bits;
};

Bits pack_codes(std::span<const std::int64_t> codes, int n);
// Throws FramingError unless bits.size() == n * payload_len.
std::vector<std::int64_t> unpack_codes(std::span<const std::uint8_t> bits, int n, std::size_t payload_len);

EncodedEmbedding encode_embedding(std::span<const double> e, const SbqConfig& cfg);
std::vector<double> decode_codes(std::span<const std::int64_t> codes, const SbqConfig& cfg);
std::vector<double> decode_bits(std::span<const std::uint8_t> bits, const SbqConfig& cfg, std::size_t payload_len);

// decode(encode(x)) without going through bits.
double quantize_feature(double p, const SbqConfig& cfg);

// Plain n-bit uniform quantizer on [0, hi]: 2^n evenly spaced levels including both ends.
double uniform_quantize(double p, int n, double hi);

double mse_sbq(std::span<const double> samples, const SbqConfig& cfg);
double mse_uniform(std::span<const double> samples, int n, double hi);

}  // namespace semra::sbq
