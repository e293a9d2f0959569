#pragma once

#include <string>

// Hot inner loops of the phase-space module: harmonic-oscillator
// eigenfunction tables and the symmetric quadratic form that turns a field
// density matrix into a quadrature density. Scalar reference kernels plus
// AVX2 variants, selected at runtime; the two are equivalence-tested.
namespace dsl::kernels {

// out[k*n_count + n] = psi_n(xs[k]) for the normalized eigenfunctions
// psi_0(x) = pi^{-1/4} exp(-x^2/2),
// psi_n(x) = sqrt(2/n) x psi_{n-1}(x) - sqrt((n-1)/n) psi_{n-2}(x).
// The recurrence on normalized functions is stable for the n and |x|
// ranges used here (n <= 512, |x| <= 40); larger requests are rejected.
void hermite_table(const double* xs, int n_points, int n_count, double* out);

// out[k] = t_k^T A t_k where t_k = &table[k*n] and A is real symmetric,
// column-major with leading dimension lda.
void sym_quad_form(const double* table, int n_points, int n,
                   const double* a, int lda, double* out);

// Backend in use: "avx2" or "scalar".
std::string active_backend();

// Test hook: "scalar", "avx2" or "auto". Throws if the requested backend
// is unsupported on this CPU.
void force_backend(const std::string& name);

namespace detail {
void hermite_table_scalar(const double* xs, int n_points, int n_count, double* out);
void sym_quad_form_scalar(const double* table, int n_points, int n,
                          const double* a, int lda, double* out);
#if defined(__x86_64__) || defined(_M_X64)
void hermite_table_avx2(const double* xs, int n_points, int n_count, double* out);
void sym_quad_form_avx2(const double* table, int n_points, int n,
                        const double* a, int lda, double* out);
#endif
} // namespace detail

} // namespace dsl::kernels
