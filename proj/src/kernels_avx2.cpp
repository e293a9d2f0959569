// AVX2 variants of the phase-space kernels. This translation unit is the
// only one compiled with -mavx2 -mfma; callers go through the runtime
// dispatch in kernels.cpp.
#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "dsl/kernels.hpp"

namespace dsl::kernels::detail {

void hermite_table_avx2(const double* xs, int n_points, int n_count, double* out) {
    constexpr double kPiQuarter = 0.7511255444649425;
    const double sqrt2 = std::sqrt(2.0);

    int k = 0;
    for (; k + 4 <= n_points; k += 4) {
        __m256d x = _mm256_loadu_pd(xs + k);
        alignas(32) double x2[4];
        _mm256_store_pd(x2, _mm256_mul_pd(x, x));
        alignas(32) double e[4];
        for (int l = 0; l < 4; ++l) e[l] = kPiQuarter * std::exp(-0.5 * x2[l]);
        __m256d p0 = _mm256_load_pd(e);
        double* rows[4];
        for (int l = 0; l < 4; ++l) rows[l] = out + static_cast<long>(k + l) * n_count;

        alignas(32) double lanes[4];
        auto scatter = [&](__m256d v, int n) {
            _mm256_store_pd(lanes, v);
            for (int l = 0; l < 4; ++l) rows[l][n] = lanes[l];
        };

        scatter(p0, 0);
        if (n_count == 1) continue;
        __m256d p1 = _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(sqrt2), x), p0);
        scatter(p1, 1);
        for (int n = 2; n < n_count; ++n) {
            const __m256d c1 = _mm256_set1_pd(std::sqrt(2.0 / n));
            const __m256d c2 = _mm256_set1_pd(std::sqrt((n - 1.0) / n));
            __m256d p2 = _mm256_fmsub_pd(_mm256_mul_pd(c1, x), p1, _mm256_mul_pd(c2, p0));
            scatter(p2, n);
            p0 = p1;
            p1 = p2;
        }
    }
    if (k < n_points)
        hermite_table_scalar(xs + k, n_points - k, n_count, out + static_cast<long>(k) * n_count);
}

void sym_quad_form_avx2(const double* table, int n_points, int n,
                        const double* a, int lda, double* out) {
    std::vector<double> v(static_cast<size_t>(n));
    const int n4 = n & ~3;
    for (int k = 0; k < n_points; ++k) {
        const double* t = table + static_cast<long>(k) * n;
        std::memset(v.data(), 0, sizeof(double) * n);
        // v = A t, accumulated column-wise so loads stay contiguous
        for (int j = 0; j < n; ++j) {
            const double* col = a + static_cast<long>(j) * lda;
            const __m256d tj = _mm256_set1_pd(t[j]);
            int i = 0;
            for (; i < n4; i += 4) {
                __m256d vi = _mm256_loadu_pd(v.data() + i);
                vi = _mm256_fmadd_pd(tj, _mm256_loadu_pd(col + i), vi);
                _mm256_storeu_pd(v.data() + i, vi);
            }
            for (; i < n; ++i) v[i] += t[j] * col[i];
        }
        __m256d acc = _mm256_setzero_pd();
        int i = 0;
        for (; i < n4; i += 4)
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(t + i), _mm256_loadu_pd(v.data() + i), acc);
        alignas(32) double lanes[4];
        _mm256_store_pd(lanes, acc);
        double s = lanes[0] + lanes[1] + lanes[2] + lanes[3];
        for (; i < n; ++i) s += t[i] * v[i];
        out[k] = s;
    }
}

} // namespace dsl::kernels::detail

#endif
