#include "semra/kernels/gemm.hpp"

#include <algorithm>
#include <cstdint>

#include "semra/common/errors.hpp"

namespace semra::kernels {
namespace {

void check(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
           std::size_t k, std::size_t n) {
    if (a.size() != m * k || b.size() != k * n || c.size() != m * n)
        throw DimensionError("gemm: operand sizes do not match m/k/n");
}

// The row kernels are cloned for AVX2 with runtime dispatch. No FMA is
// enabled, so every clone produces the same bits.
#define SEMRA_ROW_KERNEL [[gnu::target_clones("avx2", "default"), gnu::noinline]]

// ci[j] += s[q] * b[q][j] for q = 0..3 in that order, one pass over ci.
// Zero coefficients (dead relu units) add exact zeros.
inline void axpy4(double* ci, const double* s, const double* const* bq, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j)
        ci[j] = (((ci[j] + s[0] * bq[0][j]) + s[1] * bq[1][j]) + s[2] * bq[2][j]) + s[3] * bq[3][j];
}

// Row i of A*B. Accumulates over p in ascending order.
SEMRA_ROW_KERNEL void row_nn(const double* a, const double* b, double* c, std::size_t i, std::size_t k,
                             std::size_t n, bool accumulate) {
    double* ci = c + i * n;
    if (!accumulate) std::fill(ci, ci + n, 0.0);
    const double* ai = a + i * k;
    std::size_t p = 0;
    for (; p + 4 <= k; p += 4) {
        const double* bq[4] = {b + p * n, b + (p + 1) * n, b + (p + 2) * n, b + (p + 3) * n};
        axpy4(ci, ai + p, bq, n);
    }
    for (; p < k; ++p) {
        const double s = ai[p];
        const double* bp = b + p * n;
        for (std::size_t j = 0; j < n; ++j) ci[j] += s * bp[j];
    }
}

// Row i of A^T*B where A is k x m.
SEMRA_ROW_KERNEL void row_tn(const double* a, const double* b, double* c, std::size_t i, std::size_t m,
                             std::size_t k, std::size_t n, bool accumulate) {
    double* ci = c + i * n;
    if (!accumulate) std::fill(ci, ci + n, 0.0);
    std::size_t p = 0;
    for (; p + 4 <= k; p += 4) {
        const double s[4] = {a[p * m + i], a[(p + 1) * m + i], a[(p + 2) * m + i], a[(p + 3) * m + i]};
        const double* bq[4] = {b + p * n, b + (p + 1) * n, b + (p + 2) * n, b + (p + 3) * n};
        axpy4(ci, s, bq, n);
    }
    for (; p < k; ++p) {
        const double s = a[p * m + i];
        const double* bp = b + p * n;
        for (std::size_t j = 0; j < n; ++j) ci[j] += s * bp[j];
    }
}

// Row i of A*B^T where B is n x k. Each dot product keeps four partial sums
// (p mod 4) so it vectorizes; the order is fixed, not left to the compiler.
SEMRA_ROW_KERNEL void row_nt(const double* a, const double* b, double* c, std::size_t i, std::size_t k,
                             std::size_t n, bool accumulate) {
    double* ci = c + i * n;
    const double* ai = a + i * k;
    const std::size_t k4 = k / 4 * 4;
    for (std::size_t j = 0; j < n; ++j) {
        const double* bj = b + j * k;
        double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
        for (std::size_t p = 0; p < k4; p += 4) {
            s0 += ai[p] * bj[p];
            s1 += ai[p + 1] * bj[p + 1];
            s2 += ai[p + 2] * bj[p + 2];
            s3 += ai[p + 3] * bj[p + 3];
        }
        double acc = (s0 + s1) + (s2 + s3);
        for (std::size_t p = k4; p < k; ++p) acc += ai[p] * bj[p];
        ci[j] = accumulate ? ci[j] + acc : acc;
    }
}

}  // namespace

namespace serial {

void gemm_nn(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
             std::size_t k, std::size_t n, bool accumulate) {
    check(a, b, c, m, k, n);
    for (std::size_t i = 0; i < m; ++i) row_nn(a.data(), b.data(), c.data(), i, k, n, accumulate);
}

void gemm_tn(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
             std::size_t k, std::size_t n, bool accumulate) {
    check(a, b, c, m, k, n);
    for (std::size_t i = 0; i < m; ++i) row_tn(a.data(), b.data(), c.data(), i, m, k, n, accumulate);
}

void gemm_nt(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
             std::size_t k, std::size_t n, bool accumulate) {
    if (a.size() != m * k || b.size() != n * k || c.size() != m * n)
        throw DimensionError("gemm_nt: operand sizes do not match m/k/n");
    for (std::size_t i = 0; i < m; ++i) row_nt(a.data(), b.data(), c.data(), i, k, n, accumulate);
}

}  // namespace serial

namespace parallel {

void gemm_nn(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
             std::size_t k, std::size_t n, bool accumulate) {
    check(a, b, c, m, k, n);
    const auto rows = static_cast<std::int64_t>(m);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < rows; ++i)
        row_nn(a.data(), b.data(), c.data(), static_cast<std::size_t>(i), k, n, accumulate);
}

void gemm_tn(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
             std::size_t k, std::size_t n, bool accumulate) {
    check(a, b, c, m, k, n);
    const auto rows = static_cast<std::int64_t>(m);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < rows; ++i)
        row_tn(a.data(), b.data(), c.data(), static_cast<std::size_t>(i), m, k, n, accumulate);
}

void gemm_nt(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
             std::size_t k, std::size_t n, bool accumulate) {
    if (a.size() != m * k || b.size() != n * k || c.size() != m * n)
        throw DimensionError("gemm_nt: operand sizes do not match m/k/n");
    const auto rows = static_cast<std::int64_t>(m);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < rows; ++i)
        row_nt(a.data(), b.data(), c.data(), static_cast<std::size_t>(i), k, n, accumulate);
}

}  // namespace parallel

void gemm_nn(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
             std::size_t k, std::size_t n, bool accumulate) {
    if (m * k * n >= kParallelWorkThreshold && m > 1)
        parallel::gemm_nn(a, b, c, m, k, n, accumulate);
    else
        serial::gemm_nn(a, b, c, m, k, n, accumulate);
}

void gemm_tn(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
             std::size_t k, std::size_t n, bool accumulate) {
    if (m * k * n >= kParallelWorkThreshold && m > 1)
        parallel::gemm_tn(a, b, c, m, k, n, accumulate);
    else
        serial::gemm_tn(a, b, c, m, k, n, accumulate);
}

void gemm_nt(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
             std::size_t k, std::size_t n, bool accumulate) {
    if (m * k * n >= kParallelWorkThreshold && m > 1)
        parallel::gemm_nt(a, b, c, m, k, n, accumulate);
    else
        serial::gemm_nt(a, b, c, m, k, n, accumulate);
}

}  // namespace semra::kernels
