#pragma once

#include <Eigen/Dense>
#include <complex>

#include "dsl/errors.hpp"

namespace dsl {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// Fock-space truncation policy. A steady state is accepted only if the
// summed population of the top two Fock levels stays below tail_tol;
// otherwise the solver grows n_max and retries.
struct TruncationSpec {
    int n_max = 16;          // field dimension (Fock levels 0..n_max-1)
    double tail_tol = 1e-7;
    int hard_cap = 160;      // retries abort beyond this cutoff

    void validate() const {
        if (n_max < 2) throw DimensionError("TruncationSpec: n_max must be >= 2");
        if (tail_tol <= 0) throw DomainError("TruncationSpec: tail_tol must be > 0");
        if (hard_cap < n_max) throw DomainError("TruncationSpec: hard_cap < n_max");
    }
};

enum class Space { qubit, field, composite };

struct Operator {
    Matrix m;
    Space tag = Space::composite;

    int dim() const { return static_cast<int>(m.rows()); }
};

// Hermitian, PSD, unit-trace matrix on qubit (dim 2) x field (dim n_max),
// or on a single factor (the other dim is 1).
struct DensityMatrix {
    Matrix m;
    int qubit_dim = 2;
    int field_dim = 0;

    int dim() const { return static_cast<int>(m.rows()); }

    void check_dims() const {
        if (qubit_dim * field_dim != dim())
            throw DimensionError("DensityMatrix: dims do not factor the matrix size");
    }
};

// qubit basis order: index 0 = |e>, index 1 = |g>  (sigma_z|e> = +|e>)
Operator sigma_plus();
Operator sigma_minus();
Operator sigma_x();
Operator sigma_y();
Operator sigma_z();
Operator qubit_identity();

Operator annihilation(const TruncationSpec& trunc);
Operator creation(const TruncationSpec& trunc);
Operator field_identity(const TruncationSpec& trunc);
Operator number_operator(const TruncationSpec& trunc);

// Kronecker composition, qubit as the leading factor. The project-wide
// ordering convention is |qubit> (x) |field>: composite index q*n_max + f.
Operator tensor(const Operator& left, const Operator& right);

// Column-stacking vectorization: vec(rho) stacks columns of rho, so
// vec(A rho B) = (B^T (x) A) vec(rho).
Vector vectorize(const Matrix& rho);
Matrix devectorize(const Vector& v);

} // namespace dsl
