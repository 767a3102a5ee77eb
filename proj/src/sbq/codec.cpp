#include "semra/sbq/codec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "semra/common/errors.hpp"

namespace semra::sbq {
namespace {

constexpr int kMaxBits = 30;

std::int64_t clamp_index(double r, std::int64_t lo, std::int64_t hi) {
    if (!(r > static_cast<double>(lo))) return lo;  // also catches NaN
    if (r >= static_cast<double>(hi)) return hi;
    return static_cast<std::int64_t>(r);
}

}  // namespace

void SbqConfig::validate() const {
    if (n < 1 || n > kMaxBits) throw ConfigError("n", "SBQ bits per feature must be in [1, 30], got " + std::to_string(n));
    if (!(p_th > 0.0) || !std::isfinite(p_th)) throw ConfigError("p_th", "SBQ threshold must be positive and finite");
}

QuantStats quant_stats(std::span<const double> samples, std::size_t bins) {
    if (samples.empty()) throw EstimationError("quant_stats: empty sample");
    QuantStats s;
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    s.min = sorted.front();
    s.max = sorted.back();
    s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
    const std::size_t mid = sorted.size() / 2;
    s.median = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    s.histogram.assign(std::max<std::size_t>(bins, 1), 0);
    const double width = (s.max - s.min) / static_cast<double>(s.histogram.size());
    for (double x : sorted) {
        std::size_t b = width > 0.0 ? static_cast<std::size_t>((x - s.min) / width) : 0;
        ++s.histogram[std::min(b, s.histogram.size() - 1)];
    }
    return s;
}

double estimate_threshold(std::span<const double> samples, ThresholdStrategy strategy) {
    if (samples.empty()) throw EstimationError("estimate_threshold: empty sample");
    if (std::none_of(samples.begin(), samples.end(), [](double x) { return x > 0.0; }))
        throw EstimationError("estimate_threshold: sample has no positive value");
    const QuantStats s = quant_stats(samples, 1);
    const double t = strategy == ThresholdStrategy::Median ? s.median : s.mean;
    if (!(t > 0.0)) throw EstimationError("estimate_threshold: statistic is not positive");
    return t;
}

std::int64_t encode_feature(double p, const SbqConfig& cfg) {
    cfg.validate();
    if (cfg.n == 1) return p > cfg.p_th ? 1 : 0;
    const std::int64_t low = pmax(cfg.n - 1);
    // Below the threshold the code is the index of the uniform bin holding p,
    // whose midpoint is what decode_code returns. Nearest-integer rounding
    // here would shift every reconstruction up by half a bin.
    if (!(p > cfg.p_th)) return clamp_index(std::floor(p / cfg.p_th * static_cast<double>(low)), 0, low);
    return clamp_index(std::round((p - cfg.p_th) / cfg.p_th) + static_cast<double>(low), low, pmax(cfg.n));
}

double decode_code(std::int64_t code, const SbqConfig& cfg) {
    cfg.validate();
    if (code < 0 || code > pmax(cfg.n))
        throw DecodeError("decode_code: code " + std::to_string(code) + " outside [0, " + std::to_string(pmax(cfg.n)) + "]");
    if (cfg.n == 1) return code == 0 ? cfg.p_th / 2.0 : 2.0 * cfg.p_th;
    const std::int64_t low = pmax(cfg.n - 1);
    if (code < low) return static_cast<double>(2 * code + 1) / static_cast<double>(2 * low) * cfg.p_th;
    return static_cast<double>(code - low + 1) * cfg.p_th;
}

double quantize_feature(double p, const SbqConfig& cfg) { return decode_code(encode_feature(p, cfg), cfg); }

Bits pack_codes(std::span<const std::int64_t> codes, int n) {
    if (n < 1 || n > kMaxBits) throw ConfigError("n", "pack_codes: width must be in [1, 30]");
    Bits bits;
    bits.reserve(codes.size() * static_cast<std::size_t>(n));
    for (std::int64_t c : codes) {
        if (c < 0 || c > pmax(n)) throw DecodeError("pack_codes: code " + std::to_string(c) + " does not fit in " + std::to_string(n) + " bits");
        for (int b = n - 1; b >= 0; --b) bits.push_back(static_cast<std::uint8_t>((c >> b) & 1));
    }
    return bits;
}

std::vector<std::int64_t> unpack_codes(std::span<const std::uint8_t> bits, int n, std::size_t payload_len) {
    if (n < 1 || n > kMaxBits) throw ConfigError("n", "unpack_codes: width must be in [1, 30]");
    if (bits.size() != payload_len * static_cast<std::size_t>(n))
        throw FramingError("unpack_codes: got " + std::to_string(bits.size()) + " bits, expected " +
                           std::to_string(payload_len * static_cast<std::size_t>(n)));
    std::vector<std::int64_t> codes(payload_len, 0);
    std::size_t i = 0;
    for (auto& c : codes)
        for (int b = 0; b < n; ++b) c = (c << 1) | (bits[i++] & 1);
    return codes;
}

EncodedEmbedding encode_embedding(std::span<const double> e, const SbqConfig& cfg) {
    cfg.validate();
    EncodedEmbedding out;
    out.codes.n = cfg.n;
    out.codes.payload_len = e.size();
    out.codes.codes.reserve(e.size());
    for (double p : e) out.codes.codes.push_back(encode_feature(p, cfg));
    out.bits = pack_codes(out.codes.codes, cfg.n);
    return out;
}

std::vector<double> decode_codes(std::span<const std::int64_t> codes, const SbqConfig& cfg) {
    std::vector<double> out;
    out.reserve(codes.size());
    for (auto c : codes) out.push_back(decode_code(c, cfg));
    return out;
}

std::vector<double> decode_bits(std::span<const std::uint8_t> bits, const SbqConfig& cfg, std::size_t payload_len) {
    cfg.validate();
    return decode_codes(unpack_codes(bits, cfg.n, payload_len), cfg);
}

double uniform_quantize(double p, int n, double hi) {
    if (n < 1 || n > kMaxBits) throw ConfigError("n", "uniform_quantize: width must be in [1, 30]");
    if (!(hi > 0.0)) throw DomainError("uniform_quantize: range must be positive");
    const double levels = static_cast<double>(pmax(n));
    const double step = hi / levels;
    return static_cast<double>(clamp_index(std::round(p / step), 0, pmax(n))) * step;
}

double mse_sbq(std::span<const double> samples, const SbqConfig& cfg) {
    if (samples.empty()) throw DomainError("mse_sbq: empty sample");
    double acc = 0.0;
    for (double x : samples) {
        const double d = quantize_feature(x, cfg) - x;
        acc += d * d;
    }
    return acc / static_cast<double>(samples.size());
}

double mse_uniform(std::span<const double> samples, int n, double hi) {
    if (samples.empty()) throw DomainError("mse_uniform: empty sample");
    double acc = 0.0;
    for (double x : samples) {
        const double d = uniform_quantize(x, n, hi) - x;
        acc += d * d;
    }
    return acc / static_cast<double>(samples.size());
}

}  // namespace semra::sbq
