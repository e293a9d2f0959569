#pragma once

#include <vector>

#include "dsl/model.hpp"

namespace dsl {

enum class Subsystem { whole, field, qubit };

const char* to_string(Subsystem s);

struct SpectralDecomposition {
    RealVector eigenvalues; // descending
    Matrix eigenvectors;    // orthonormal columns, matching order
};

SpectralDecomposition spectral(const DensityMatrix& rho);

DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep);

// d rho_SS / d(drive) via the trace-constrained linear solve; finite
// differences stay in the tests as the independent oracle.
DensityMatrix rho_derivative(const ModelParams& params, const TruncationSpec& trunc);

// Q = 2 sum_{m,n} |<psi_m| drho |psi_n>|^2 / (lambda_m + lambda_n) over
// eigenpairs with lambda_m + lambda_n > eig_floor. skipped_mass, when
// given, collects the |<psi_m|drho|psi_n>|^2 weight of skipped terms so
// near-degenerate states stay auditable.
double qfi(const DensityMatrix& rho, const Matrix& drho, double eig_floor = 1e-12,
           double* skipped_mass = nullptr);

// F = sum_k (dp_k)^2 / p_k over outcomes with p_k >= prob_floor.
double cfi_discrete(const std::vector<double>& probs, const std::vector<double>& dprobs,
                    double prob_floor = 1e-14);

struct FisherPoint {
    ModelParams params;
    Subsystem subsystem = Subsystem::whole;
    double qfi = 0.0;
    double scaled_qfi = 0.0; // g^2 * qfi

    static FisherPoint make(const ModelParams& p, Subsystem s, double q) {
        return FisherPoint{p, s, q, p.g * p.g * q};
    }
};

// One steady-state solve feeding all three subsystem QFIs.
struct FisherAllResult {
    double qfi_whole = 0.0;
    double qfi_field = 0.0;
    double qfi_qubit = 0.0;
    int cutoff_used = 0;
    double residual = 0.0;

    double get(Subsystem s) const {
        switch (s) {
            case Subsystem::whole: return qfi_whole;
            case Subsystem::field: return qfi_field;
            default: return qfi_qubit;
        }
    }
};

FisherAllResult fisher_all(const ModelParams& params, const TruncationSpec& trunc);
double fisher_subsystem(const ModelParams& params, const TruncationSpec& trunc, Subsystem s);

struct OptimizeResult {
    double drive = 0.0;
    double detuning = 0.0;
    double qfi = 0.0;
    int evaluations = 0;
};

// Coarse-grid argmax over the drive grid followed by deterministic
// golden-section refinement at fixed detuning (params.detuning).
OptimizeResult optimize_drive(const ModelParams& params_without_drive, const TruncationSpec& trunc,
                              Subsystem subsystem, const std::vector<double>& drive_grid,
                              double drive_tol = 5e-4);

// 2-D grid maximum with coordinate-wise golden refinement. Grid ties break
// toward smaller |detuning|, then smaller drive.
OptimizeResult optimize_drive_detuning(const ModelParams& params_base, const TruncationSpec& trunc,
                                       Subsystem subsystem,
                                       const std::vector<double>& detuning_grid,
                                       const std::vector<double>& drive_grid,
                                       double tol = 5e-4);

struct ScalingFit {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double rms_residual = 0.0;
    double n_min_used = 20.0;
};

// Nonlinear least squares of value = A * N^B + C on points with N > n_min.
ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points, double n_min = 20.0);

} // namespace dsl
