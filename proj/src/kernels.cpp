#include "dsl/kernels.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "dsl/errors.hpp"

namespace dsl::kernels {

namespace detail {

void hermite_table_scalar(const double* xs, int n_points, int n_count, double* out) {
    constexpr double kPiQuarter = 0.7511255444649425; // pi^{-1/4}
    for (int k = 0; k < n_points; ++k) {
        const double x = xs[k];
        double* row = out + static_cast<long>(k) * n_count;
        double p0 = kPiQuarter * std::exp(-0.5 * x * x);
        row[0] = p0;
        if (n_count == 1) continue;
        double p1 = std::sqrt(2.0) * x * p0;
        row[1] = p1;
        for (int n = 2; n < n_count; ++n) {
            const double p2 = std::sqrt(2.0 / n) * x * p1 - std::sqrt((n - 1.0) / n) * p0;
            row[n] = p2;
            p0 = p1;
            p1 = p2;
        }
    }
}

void sym_quad_form_scalar(const double* table, int n_points, int n,
                          const double* a, int lda, double* out) {
    for (int k = 0; k < n_points; ++k) {
        const double* t = table + static_cast<long>(k) * n;
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const double* col = a + static_cast<long>(j) * lda;
            double dot = 0.0;
            for (int i = 0; i < n; ++i) dot += col[i] * t[i];
            acc += t[j] * dot;
        }
        out[k] = acc;
    }
}

} // namespace detail

namespace {

using HermiteFn = void (*)(const double*, int, int, double*);
using QuadFormFn = void (*)(const double*, int, int, const double*, int, double*);

struct Backend {
    HermiteFn hermite;
    QuadFormFn quad_form;
    const char* name;
};

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend scalar_backend() {
    return {detail::hermite_table_scalar, detail::sym_quad_form_scalar, "scalar"};
}

Backend avx2_backend() {
#if defined(__x86_64__) || defined(_M_X64)
    return {detail::hermite_table_avx2, detail::sym_quad_form_avx2, "avx2"};
#else
    throw DomainError("avx2 backend not built on this architecture");
#endif
}

Backend pick_backend() {
    return avx2_available() ? avx2_backend() : scalar_backend();
}

std::atomic<const Backend*> g_backend{nullptr};

const Backend& backend() {
    const Backend* b = g_backend.load(std::memory_order_acquire);
    if (!b) {
        static Backend chosen = pick_backend();
        g_backend.store(&chosen, std::memory_order_release);
        b = &chosen;
    }
    return *b;
}

} // namespace

void hermite_table(const double* xs, int n_points, int n_count, double* out) {
    if (n_count < 1 || n_count > 512)
        throw DomainError("hermite_table: n_count outside stable range [1, 512]");
    for (int k = 0; k < n_points; ++k)
        if (std::abs(xs[k]) > 40.0)
            throw DomainError("hermite_table: |x| beyond stable range 40");
    backend().hermite(xs, n_points, n_count, out);
}

void sym_quad_form(const double* table, int n_points, int n,
                   const double* a, int lda, double* out) {
    backend().quad_form(table, n_points, n, a, lda, out);
}

std::string active_backend() { return backend().name; }

void force_backend(const std::string& name) {
    static Backend forced;
    if (name == "auto") {
        forced = pick_backend();
    } else if (name == "scalar") {
        forced = scalar_backend();
    } else if (name == "avx2") {
        if (!avx2_available()) throw DomainError("force_backend: avx2 unsupported on this CPU");
        forced = avx2_backend();
    } else {
        throw DomainError("force_backend: unknown backend " + name);
    }
    g_backend.store(&forced, std::memory_order_release);
}

} // namespace dsl::kernels
