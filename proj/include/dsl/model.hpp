#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <memory>
#include <utility>

#include "dsl/operators.hpp"

namespace dsl {

using SparseCMatrix = Eigen::SparseMatrix<Complex>;

// Physical parameters, hbar = 1 and one shared unit system. g = 1 with
// kappa = 1/(2 sqrt(N)) is the numerically preferred gauge: the steady
// state only depends on ratios, and g^2 * QFI is the invariant that the
// reporting layer uses.
struct ModelParams {
    double g = 1.0;        // qubit-field coupling (reference frequency)
    double kappa = 0.05;   // field decay rate
    double drive = 0.0;    // drive amplitude
    double detuning = 0.0; // Delta = Omega - omega

    double resource() const { return (g / (2.0 * kappa)) * (g / (2.0 * kappa)); }

    void validate() const {
        if (g < 0) throw DomainError("ModelParams: g must be >= 0");
        if (kappa <= 0) throw DomainError("ModelParams: kappa must be > 0");
        if (drive < 0) throw DomainError("ModelParams: drive must be >= 0");
    }

    // Dimensionless entry point used throughout the CLI: fixes g = 1 and
    // kappa = 1/(2 sqrt(N)).
    static ModelParams from_resource(double n_resource, double drive_over_g,
                                     double detuning_over_g);
};

// Generator of vectorized dynamics, side = (2 n_max)^2. Stored sparse:
// at the scales this project runs (cutoffs up to 160, side up to 102400)
// a dense superoperator would not fit in memory.
struct Superoperator {
    SparseCMatrix m;

    long side() const { return m.rows(); }
    Vector apply(const Vector& v) const { return m * v; }
};

struct SteadyStateResult {
    DensityMatrix rho;       // composite, Hermitian, PSD, unit trace
    double residual = 0.0;   // ||L vec(rho)||_2 / ||L||_F
    double tail_population = 0.0;
    int cutoff_used = 0;
};

// H = -Delta (a^dag a + s+ s-) + g (s+ a + s- a^dag) + E (a + a^dag)
Operator build_hamiltonian(const ModelParams& params, const TruncationSpec& trunc);

// L[rho] = -i [H, rho] + kappa (2 a rho a^dag - rho a^dag a - a^dag a rho),
// as a matrix on column-stacked rho via vec(A rho B) = (B^T (x) A) vec(rho).
Superoperator build_liouvillian(const ModelParams& params, const TruncationSpec& trunc);

// Superoperator of -i [a + a^dag, .] on the composite space; this is
// dL/d(drive) and feeds the analytic steady-state derivative.
Superoperator build_drive_generator(const TruncationSpec& trunc);

// Trace-constrained direct solve of L rho = 0: one row of L is replaced by
// the vectorized trace functional with right-hand side 1. The factorization
// is kept so the drive derivative reuses it. If the tail population exceeds
// trunc.tail_tol the solve retries with n_max grown by 50% up to the hard
// cap. g = 0 decouples the qubit and makes the composite Liouvillian
// degenerate; that case is solved on the field factor alone and embedded
// as |g><g| (x) rho_field.
class SteadyStateSolver {
public:
    SteadyStateSolver(const ModelParams& params, const TruncationSpec& trunc,
                      double residual_tol = 1e-10);
    ~SteadyStateSolver();
    SteadyStateSolver(SteadyStateSolver&&) noexcept;
    SteadyStateSolver& operator=(SteadyStateSolver&&) noexcept;

    const SteadyStateResult& result() const;

    // d rho_SS / d(drive): solves L vec(drho) = -(dL/dE) vec(rho_SS) with
    // Tr drho = 0 on the already-factorized system. Hermitian, traceless.
    DensityMatrix drive_derivative() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

SteadyStateResult steady_state(const ModelParams& params, const TruncationSpec& trunc);

// Quasienergy doublet (E_{n,+}, E_{n,-}) = +-sqrt(n) g (1 - (2E/g)^2)^{3/4},
// valid below threshold 2E <= g; above it the spectrum is continuous and
// the call is a DomainError.
std::pair<double, double> quasienergies(int n, double drive, double g);

// (Tr[sigma_x rho], Tr[sigma_y rho], Tr[sigma_z rho]); sigma_z |e> = +|e>.
struct BlochVector {
    double sx, sy, sz;
};
BlochVector qubit_bloch(const DensityMatrix& rho_qubit);

} // namespace dsl
