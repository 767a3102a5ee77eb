#pragma once

// Dense row-major matrix products. Every variant has a serial reference and
// an OpenMP version; both run the same per-row kernel, so their results are
// bit-identical and the serial path stays usable as a test oracle.

#include <cstddef>
#include <span>

namespace semra::kernels {

// C(m x n) (+)= A(m x k) * B(k x n)
// C(m x n) (+)= A(k x m)^T * B(k x n)
// C(m x n) (+)= A(m x k) * B(n x k)^T
namespace serial {
void gemm_nn(std::span<const double> a, std::span<const double> b, std::span<double> c,
             std::size_t m, std::size_t k, std::size_t n, bool accumulate = false);
void gemm_tn(std::span<const double> a, std::span<const double> b, std::span<double> c,
             std::size_t m, std::size_t k, std::size_t n, bool accumulate = false);
void gemm_nt(std::span<const double> a, std::span<const double> b, std::span<double> c,
             std::size_t m, std::size_t k, std::size_t n, bool accumulate = false);
}  // namespace serial

namespace parallel {
void gemm_nn(std::span<const double> a, std::span<const double> b, std::span<double> c,
             std::size_t m, std::size_t k, std::size_t n, bool accumulate = false);
void gemm_tn(std::span<const double> a, std::span<const double> b, std::span<double> c,
             std::size_t m, std::size_t k, std::size_t n, bool accumulate = false);
void gemm_nt(std::span<const double> a, std::span<const double> b, std::span<double> c,
             std::size_t m, std::size_t k, std::size_t n, bool accumulate = false);
}  // namespace parallel

// Library entry points: OpenMP above a work threshold, serial below it.
void gemm_nn(std::span<const double> a, std::span<const double> b, std::span<double> c,
             std::size_t m, std::size_t k, std::size_t n, bool accumulate = false);
void gemm_tn(std::span<const double> a, std::span<const double> b, std::span<double> c,
             std::size_t m, std::size_t k, std::size_t n, bool accumulate = false);
void gemm_nt(std::span<const double> a, std::span<const double> b, std::span<double> c,
             std::size_t m, std::size_t k, std::size_t n, bool accumulate = false);

// Work (m*k*n) above which the dispatchers use the OpenMP path.
inline constexpr std::size_t kParallelWorkThreshold = 1u << 16;

}  // namespace semra::kernels
