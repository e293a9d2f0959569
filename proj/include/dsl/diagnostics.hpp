#pragma once

#include "dsl/model.hpp"

namespace dsl {

// log2 of the trace norm of the partial transpose on the qubit factor;
// zero for separable states, clipped at 0 against rounding.
double log_negativity(const DensityMatrix& rho);

double purity(const DensityMatrix& rho);

// Uhlmann fidelity F(rho, sigma) = Tr sqrt(sqrt(rho) sigma sqrt(rho)),
// square-root convention: for nearby states along a curve rho(theta),
// QFI ~ 8 (1 - F) / dtheta^2.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

struct StateDiagnostics {
    double log_neg = 0.0;
    double purity = 0.0;
    double mean_photons = 0.0;
    BlochVector bloch{0.0, 0.0, 0.0};
};

StateDiagnostics compute_diagnostics(const DensityMatrix& rho_composite);

} // namespace dsl
