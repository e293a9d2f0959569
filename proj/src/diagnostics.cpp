#include "dsl/diagnostics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

#include "dsl/metrology.hpp"

namespace dsl {

namespace {

Matrix psd_sqrt(const Matrix& h, const char* where) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (h + h.adjoint()));
    RealVector vals = eig.eigenvalues();
    for (long i = 0; i < vals.size(); ++i) {
        if (vals(i) < -1e-8) throw DomainError(std::string(where) + ": matrix is not PSD");
        vals(i) = std::sqrt(std::max(vals(i), 0.0));
    }
    return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().adjoint();
}

} // namespace

double log_negativity(const DensityMatrix& rho) {
    rho.check_dims();
    if (rho.qubit_dim != 2)
        throw DimensionError("log_negativity: needs the composite qubit (x) field state");
    const int nf = rho.field_dim;

    // partial transpose on the qubit: swap the off-diagonal qubit blocks
    Matrix pt = rho.m;
    pt.block(0, nf, nf, nf) = rho.m.block(nf, 0, nf, nf);
    pt.block(nf, 0, nf, nf) = rho.m.block(0, nf, nf, nf);

    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (pt + pt.adjoint()));
    const double trace_norm = eig.eigenvalues().cwiseAbs().sum();
    return std::max(std::log2(trace_norm), 0.0);
}

double purity(const DensityMatrix& rho) {
    return (rho.m * rho.m).trace().real();
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw DimensionError("fidelity: dimension mismatch");
    const Matrix sr = psd_sqrt(rho.m, "fidelity");
    const Matrix inner = psd_sqrt(sr * sigma.m * sr, "fidelity");
    const double f = inner.trace().real();
    return std::min(std::max(f, 0.0), 1.0);
}

StateDiagnostics compute_diagnostics(const DensityMatrix& rho_composite) {
    rho_composite.check_dims();
    StateDiagnostics out;
    out.log_neg = log_negativity(rho_composite);
    out.purity = purity(rho_composite);
    const DensityMatrix rho_f = partial_trace(rho_composite, Subsystem::field);
    for (int k = 0; k < rho_f.dim(); ++k)
        out.mean_photons += k * rho_f.m(k, k).real();
    out.bloch = qubit_bloch(partial_trace(rho_composite, Subsystem::qubit));
    return out;
}

} // namespace dsl
