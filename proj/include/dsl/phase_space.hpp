#pragma once

#include <utility>

#include "dsl/metrology.hpp"

namespace dsl {

struct PhaseSpaceGrid {
    double x_min = -10.0;
    double x_max = 10.0;
    int points = 801;

    double spacing() const { return (x_max - x_min) / (points - 1); }

    void validate() const {
        if (points < 2) throw DomainError("PhaseSpaceGrid: points must be >= 2");
        if (!(x_max > x_min)) throw DomainError("PhaseSpaceGrid: empty range");
    }

    RealVector linspace() const;
};

// Sampled density of the rotated quadrature
//   X_phi = (a e^{-i phi} + a^dag e^{i phi}) / sqrt(2),
// with eigenfunction convention <X_phi|n> = e^{-i n phi} psi_n(x), fixed so
// that a coherent state alpha has mean sqrt(2)|alpha| cos(arg alpha - phi).
struct QuadratureDistribution {
    double angle = 0.0;
    RealVector grid;
    RealVector density;
    double tail_mass = 0.0; // estimated probability outside the grid
};

QuadratureDistribution quadrature_pdf(const DensityMatrix& rho_field, double angle,
                                      const RealVector& xs);

struct WignerResult {
    RealMatrix w;         // w(i, j) = W(x_i, p_j)
    double integral;      // trapezoidal \iint W dx dp
    bool coverage_ok;     // |integral - 1| <= 1e-3
};

// Wigner function with the convention x = (a + a^dag)/sqrt(2), evaluated
// through the Fock-basis displaced-parity kernel rather than the defining
// y-integral; the two are checked against each other in the tests.
WignerResult wigner(const DensityMatrix& rho_field, const PhaseSpaceGrid& grid);

struct HusimiResult {
    RealMatrix q;         // q(i, j) = p(Upsilon = re_i + i*im_j)
    double integral;      // trapezoidal \iint over the complex plane
    bool coverage_ok;
};

// Heterodyne outcome density p(Upsilon) = <Upsilon|rho|Upsilon> / pi.
HusimiResult heterodyne_pdf(const DensityMatrix& rho_field, const PhaseSpaceGrid& grid);

// Quadrature grid sized from the field moments (mean and variance of a),
// wide enough that the stated normalization tolerances hold.
PhaseSpaceGrid auto_quadrature_grid(const DensityMatrix& rho_field, int points = 801);
PhaseSpaceGrid auto_amplitude_grid(const DensityMatrix& rho_field, int points = 201);

// Homodyne CFI over the quadrature distribution (trapezoidal, points with
// p < 1e-14 skipped). The state-level form takes rho and its drive
// derivative reduced to the field.
double cfi_homodyne(const DensityMatrix& rho_field, const DensityMatrix& drho_field,
                    double angle, const RealVector& xs);
double cfi_homodyne(const ModelParams& params, const TruncationSpec& trunc, double angle,
                    const PhaseSpaceGrid& grid);

std::pair<double, double> optimize_homodyne_angle(const DensityMatrix& rho_field,
                                                  const DensityMatrix& drho_field,
                                                  const RealVector& xs,
                                                  const std::vector<double>& angle_grid,
                                                  double angle_tol = 1e-4);
std::pair<double, double> optimize_homodyne_angle(const ModelParams& params,
                                                  const TruncationSpec& trunc,
                                                  const std::vector<double>& angle_grid);

double cfi_heterodyne(const DensityMatrix& rho_field, const DensityMatrix& drho_field,
                      const PhaseSpaceGrid& grid);
double cfi_heterodyne(const ModelParams& params, const TruncationSpec& trunc,
                      const PhaseSpaceGrid& grid);

enum class Scheme { homodyne, heterodyne };

// F_field(scheme) / Q_whole at the given operating point; homodyne is
// evaluated at its optimal angle.
double performance_ratio(const ModelParams& params, const TruncationSpec& trunc, Scheme scheme);

// Everything the measurement comparison needs from one steady-state solve.
struct MeasurementAnalysis {
    double q_whole = 0.0;
    double q_field = 0.0;
    double angle_opt = 0.0;
    double cfi_hom = 0.0;
    double cfi_het = 0.0;
};
MeasurementAnalysis analyze_measurements(const DensityMatrix& rho, const DensityMatrix& drho,
                                         int quad_points = 801, int het_points = 201);

std::vector<double> default_angle_grid(int points = 25); // covers [0, pi)

} // namespace dsl
