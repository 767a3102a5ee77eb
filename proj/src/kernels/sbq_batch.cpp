#include "semra/kernels/sbq_batch.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

#include "semra/common/errors.hpp"

namespace semra::kernels {
namespace {

// Partial sums are taken per fixed-size chunk and added in chunk order, so
// both versions round identically.
constexpr std::size_t kChunk = 4096;

std::size_t chunks(std::size_t n) { return (n + kChunk - 1) / kChunk; }

void roundtrip_chunk(std::span<const double> in, std::span<double> out, const sbq::SbqConfig& cfg, std::size_t c) {
    const std::size_t end = std::min(in.size(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) out[i] = sbq::quantize_feature(in[i], cfg);
}

double error_chunk(std::span<const double> in, const sbq::SbqConfig& cfg, std::size_t c) {
    const std::size_t end = std::min(in.size(), (c + 1) * kChunk);
    double acc = 0.0;
    for (std::size_t i = c * kChunk; i < end; ++i) {
        const double d = sbq::quantize_feature(in[i], cfg) - in[i];
        acc += d * d;
    }
    return acc;
}

}  // namespace

namespace serial {

void sbq_roundtrip(std::span<const double> in, std::span<double> out, const sbq::SbqConfig& cfg) {
    if (in.size() != out.size()) throw DimensionError("sbq_roundtrip: input and output sizes differ");
    cfg.validate();
    for (std::size_t c = 0; c < chunks(in.size()); ++c) roundtrip_chunk(in, out, cfg, c);
}

double sbq_squared_error(std::span<const double> in, const sbq::SbqConfig& cfg) {
    cfg.validate();
    double total = 0.0;
    for (std::size_t c = 0; c < chunks(in.size()); ++c) total += error_chunk(in, cfg, c);
    return total;
}

}  // namespace serial

namespace parallel {

void sbq_roundtrip(std::span<const double> in, std::span<double> out, const sbq::SbqConfig& cfg) {
    if (in.size() != out.size()) throw DimensionError("sbq_roundtrip: input and output sizes differ");
    cfg.validate();
    const auto n = static_cast<std::int64_t>(chunks(in.size()));
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < n; ++c) roundtrip_chunk(in, out, cfg, static_cast<std::size_t>(c));
}

double sbq_squared_error(std::span<const double> in, const sbq::SbqConfig& cfg) {
    cfg.validate();
    const auto n = static_cast<std::int64_t>(chunks(in.size()));
    std::vector<double> partial(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < n; ++c) partial[static_cast<std::size_t>(c)] = error_chunk(in, cfg, static_cast<std::size_t>(c));
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

}  // namespace parallel

void sbq_roundtrip(std::span<const double> in, std::span<double> out, const sbq::SbqConfig& cfg) {
    if (chunks(in.size()) > 1)
        parallel::sbq_roundtrip(in, out, cfg);
    else
        serial::sbq_roundtrip(in, out, cfg);
}

double sbq_squared_error(std::span<const double> in, const sbq::SbqConfig& cfg) {
    return chunks(in.size()) > 1 ? parallel::sbq_squared_error(in, cfg) : serial::sbq_squared_error(in, cfg);
}

}  // namespace semra::kernels
