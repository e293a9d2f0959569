#include "dsl/phase_space.hpp"

#include <algorithm>
#include <cmath>

#include "dsl/kernels.hpp"

namespace dsl {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_field(const DensityMatrix& rho, const char* where) {
    rho.check_dims();
    if (rho.qubit_dim != 1)
        throw DimensionError(std::string(where) + ": expected a field-only density matrix");
}

double trapezoid_weight(int k, int points, double h) {
    return (k == 0 || k == points - 1) ? 0.5 * h : h;
}

// psi^T Re(D rho D^dag) psi on every grid point, D = diag(e^{-i n phi}).
RealVector quad_form_density(const Matrix& rho, double angle, const RealVector& xs) {
    const int n = static_cast<int>(rho.rows());
    const int points = static_cast<int>(xs.size());
    Vector phase(n);
    for (int k = 0; k < n; ++k)
        phase(k) = std::polar(1.0, -angle * k);
    RealMatrix a = (phase.asDiagonal() * rho * phase.conjugate().asDiagonal()).real();
    a = 0.5 * (a + a.transpose()).eval();

    std::vector<double> table(static_cast<size_t>(points) * n);
    kernels::hermite_table(xs.data(), points, n, table.data());
    RealVector out(points);
    kernels::sym_quad_form(table.data(), points, n, a.data(), n, out.data());
    return out;
}

Complex field_mean_a(const DensityMatrix& rho) {
    const int n = rho.dim();
    Complex mean = 0.0;
    for (int k = 1; k < n; ++k)
        mean += std::sqrt(double(k)) * rho.m(k - 1, k); // Tr[a rho]
    return mean;
}

double field_mean_n(const DensityMatrix& rho) {
    double nbar = 0.0;
    for (int k = 0; k < rho.dim(); ++k)
        nbar += k * rho.m(k, k).real();
    return nbar;
}

struct FieldPair {
    DensityMatrix rho;
    DensityMatrix drho;
};

FieldPair solve_field(const ModelParams& params, const TruncationSpec& trunc) {
    SteadyStateSolver solver(params, trunc);
    FieldPair out{partial_trace(solver.result().rho, Subsystem::field),
                  partial_trace(solver.drive_derivative(), Subsystem::field)};
    return out;
}

} // namespace

RealVector PhaseSpaceGrid::linspace() const {
    validate();
    return RealVector::LinSpaced(points, x_min, x_max);
}

QuadratureDistribution quadrature_pdf(const DensityMatrix& rho_field, double angle,
                                      const RealVector& xs) {
    require_field(rho_field, "quadrature_pdf");
    if (xs.size() < 2) throw DomainError("quadrature_pdf: need at least 2 grid points");

    QuadratureDistribution out;
    out.angle = angle;
    out.grid = xs;
    out.density = quad_form_density(rho_field.m, angle, xs);

    double mass = 0.0;
    const int points = static_cast<int>(xs.size());
    for (int k = 0; k < points; ++k) {
        if (out.density(k) < -1e-9)
            throw DomainError("quadrature_pdf: density below the PSD rounding floor");
        out.density(k) = std::max(out.density(k), 0.0);
    }
    const double h = (xs(points - 1) - xs(0)) / (points - 1);
    for (int k = 0; k < points; ++k)
        mass += trapezoid_weight(k, points, h) * out.density(k);
    out.tail_mass = 1.0 - mass;
    return out;
}

WignerResult wigner(const DensityMatrix& rho_field, const PhaseSpaceGrid& grid) {
    require_field(rho_field, "wigner");
    const RealVector xs = grid.linspace();
    const int points = grid.points;
    const int n = rho_field.dim();
    const Matrix& rho = rho_field.m;

    WignerResult out;
    out.w.resize(points, points);

    // W(x, p) = (1/pi) Tr[rho D(2 alpha) (-1)^N], alpha = (x + i p)/sqrt(2).
    // Expanded over diagonals d = row - col of rho with the scaled pieces
    //   B_d = (2 conj(alpha))^d e^{-z/2} / sqrt(d!),   z = 4 |alpha|^2,
    //   S_{m,d} = sqrt(d! m! / (m+d)!) L_m^{(d)}(z),
    // both bounded well inside double range for z <= ~700.
    for (int i = 0; i < points; ++i) {
        for (int j = 0; j < points; ++j) {
            const double x = xs(i), p = xs(j);
            const double z = 2.0 * (x * x + p * p);
            if (z > 700.0) { // true value below e^{-350}; avoid S overflow
                out.w(i, j) = 0.0;
                continue;
            }
            const Complex beta_bar = std::sqrt(2.0) * Complex(x, -p); // 2 conj(alpha)
            Complex b_d = std::exp(-0.5 * z);
            double w = 0.0;
            for (int d = 0; d < n; ++d) {
                if (d > 0) b_d *= beta_bar / std::sqrt(double(d));
                Complex t = 0.0;
                double s_prev2 = 1.0; // S_{0,d}
                double s_prev = (1.0 + d - z) / std::sqrt(1.0 + d);
                double sign = 1.0;
                for (int m = 0; m + d < n; ++m) {
                    double s;
                    if (m == 0)
                        s = s_prev2;
                    else if (m == 1)
                        s = s_prev;
                    else {
                        s = ((2.0 * m + d - 1.0 - z) * std::sqrt(double(m) / (m + d)) * s_prev -
                             (m + d - 1.0) *
                                 std::sqrt(double(m) * (m - 1.0) / ((m + d) * (m + d - 1.0))) *
                                 s_prev2) /
                            double(m);
                        s_prev2 = s_prev;
                        s_prev = s;
                    }
                    t += sign * s * rho(m + d, m);
                    sign = -sign;
                }
                w += (d == 0 ? 1.0 : 2.0) * (b_d * t).real();
            }
            out.w(i, j) = w / kPi;
        }
    }

    const double h = grid.spacing();
    double integral = 0.0;
    for (int i = 0; i < points; ++i)
        for (int j = 0; j < points; ++j)
            integral += trapezoid_weight(i, points, h) * trapezoid_weight(j, points, h) *
                        out.w(i, j);
    out.integral = integral;
    out.coverage_ok = std::abs(integral - 1.0) <= 1e-3;
    return out;
}

HusimiResult heterodyne_pdf(const DensityMatrix& rho_field, const PhaseSpaceGrid& grid) {
    require_field(rho_field, "heterodyne_pdf");
    const RealVector xs = grid.linspace();
    const int points = grid.points;
    const int n = rho_field.dim();

    HusimiResult out;
    out.q.resize(points, points);
    Vector u(n);
    for (int i = 0; i < points; ++i) {
        for (int j = 0; j < points; ++j) {
            const Complex ups(xs(i), xs(j));
            u(0) = std::exp(-0.5 * std::norm(ups));
            for (int k = 1; k < n; ++k)
                u(k) = u(k - 1) * ups / std::sqrt(double(k));
            const double q = ((u.adjoint() * rho_field.m * u)(0).real()) / kPi;
            out.q(i, j) = std::max(q, 0.0);
        }
    }

    const double h = grid.spacing();
    double integral = 0.0;
    for (int i = 0; i < points; ++i)
        for (int j = 0; j < points; ++j)
            integral += trapezoid_weight(i, points, h) * trapezoid_weight(j, points, h) *
                        out.q(i, j);
    out.integral = integral;
    out.coverage_ok = std::abs(integral - 1.0) <= 1e-3;
    return out;
}

PhaseSpaceGrid auto_quadrature_grid(const DensityMatrix& rho_field, int points) {
    require_field(rho_field, "auto_quadrature_grid");
    const double amp = std::abs(field_mean_a(rho_field));
    const double nbar = field_mean_n(rho_field);
    const double spread = std::sqrt(2.0 * std::max(nbar - amp * amp, 0.0) + 1.0);
    double r = std::sqrt(2.0) * amp + 3.0 * spread + 5.0;
    r = std::min(r, std::sqrt(2.0 * rho_field.dim()) + 4.0);
    return PhaseSpaceGrid{-r, r, points};
}

PhaseSpaceGrid auto_amplitude_grid(const DensityMatrix& rho_field, int points) {
    require_field(rho_field, "auto_amplitude_grid");
    const double amp = std::abs(field_mean_a(rho_field));
    const double nbar = field_mean_n(rho_field);
    const double spread = std::sqrt(std::max(nbar - amp * amp, 0.0) + 1.0);
    double r = amp + 3.0 * spread + 3.0;
    r = std::min(r, std::sqrt(double(rho_field.dim())) + 4.0);
    return PhaseSpaceGrid{-r, r, points};
}

double cfi_homodyne(const DensityMatrix& rho_field, const DensityMatrix& drho_field,
                    double angle, const RealVector& xs) {
    require_field(rho_field, "cfi_homodyne");
    if (rho_field.dim() != drho_field.dim())
        throw DimensionError("cfi_homodyne: rho/drho dimension mismatch");
    const QuadratureDistribution dist = quadrature_pdf(rho_field, angle, xs);
    const RealVector dp = quad_form_density(drho_field.m, angle, xs);
    const int points = static_cast<int>(xs.size());
    const double h = (xs(points - 1) - xs(0)) / (points - 1);
    double f = 0.0;
    for (int k = 0; k < points; ++k)
        if (dist.density(k) >= 1e-14)
            f += trapezoid_weight(k, points, h) * dp(k) * dp(k) / dist.density(k);
    return f;
}

double cfi_homodyne(const ModelParams& params, const TruncationSpec& trunc, double angle,
                    const PhaseSpaceGrid& grid) {
    const FieldPair fp = solve_field(params, trunc);
    return cfi_homodyne(fp.rho, fp.drho, angle, grid.linspace());
}

std::pair<double, double> optimize_homodyne_angle(const DensityMatrix& rho_field,
                                                  const DensityMatrix& drho_field,
                                                  const RealVector& xs,
                                                  const std::vector<double>& angle_grid,
                                                  double angle_tol) {
    if (angle_grid.size() < 3)
        throw DomainError("optimize_homodyne_angle: need at least 3 angles");
    auto f = [&](double phi) { return cfi_homodyne(rho_field, drho_field, phi, xs); };

    std::vector<double> vals(angle_grid.size());
    for (size_t i = 0; i < angle_grid.size(); ++i) vals[i] = f(angle_grid[i]);
    const size_t i = static_cast<size_t>(
        std::max_element(vals.begin(), vals.end()) - vals.begin());

    // the CFI is pi-periodic in the angle, so brackets may wrap past the ends
    const double step0 = angle_grid[1] - angle_grid[0];
    const double lo = i == 0 ? angle_grid.front() - step0 : angle_grid[i - 1];
    const double hi = i + 1 == angle_grid.size()
                          ? angle_grid.back() + step0
                          : angle_grid[i + 1];

    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > angle_tol) {
        if (f1 >= f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    double best_phi = f1 >= f2 ? x1 : x2;
    double best_f = std::max(f1, f2);
    if (vals[i] > best_f) {
        best_phi = angle_grid[i];
        best_f = vals[i];
    }
    best_phi = std::fmod(best_phi + kPi, kPi); // report in [0, pi)
    if (best_phi < 0) best_phi += kPi;
    return {best_phi, best_f};
}

std::pair<double, double> optimize_homodyne_angle(const ModelParams& params,
                                                  const TruncationSpec& trunc,
                                                  const std::vector<double>& angle_grid) {
    const FieldPair fp = solve_field(params, trunc);
    const RealVector xs = auto_quadrature_grid(fp.rho).linspace();
    return optimize_homodyne_angle(fp.rho, fp.drho, xs, angle_grid);
}

double cfi_heterodyne(const DensityMatrix& rho_field, const DensityMatrix& drho_field,
                      const PhaseSpaceGrid& grid) {
    require_field(rho_field, "cfi_heterodyne");
    if (rho_field.dim() != drho_field.dim())
        throw DimensionError("cfi_heterodyne: rho/drho dimension mismatch");
    const RealVector xs = grid.linspace();
    const int points = grid.points;
    const int n = rho_field.dim();
    const double h = grid.spacing();

    Vector u(n);
    double f = 0.0;
    for (int i = 0; i < points; ++i) {
        for (int j = 0; j < points; ++j) {
            const Complex ups(xs(i), xs(j));
            u(0) = std::exp(-0.5 * std::norm(ups));
            for (int k = 1; k < n; ++k)
                u(k) = u(k - 1) * ups / std::sqrt(double(k));
            const double q = ((u.adjoint() * rho_field.m * u)(0).real()) / kPi;
            if (q < 1e-14) continue;
            const double dq = ((u.adjoint() * drho_field.m * u)(0).real()) / kPi;
            f += trapezoid_weight(i, points, h) * trapezoid_weight(j, points, h) * dq * dq / q;
        }
    }
    return f;
}

double cfi_heterodyne(const ModelParams& params, const TruncationSpec& trunc,
                      const PhaseSpaceGrid& grid) {
    const FieldPair fp = solve_field(params, trunc);
    return cfi_heterodyne(fp.rho, fp.drho, grid);
}

std::vector<double> default_angle_grid(int points) {
    if (points < 3) throw DomainError("default_angle_grid: need at least 3 angles");
    std::vector<double> out(points);
    for (int k = 0; k < points; ++k) out[k] = kPi * k / points;
    return out;
}

MeasurementAnalysis analyze_measurements(const DensityMatrix& rho, const DensityMatrix& drho,
                                         int quad_points, int het_points) {
    MeasurementAnalysis out;
    out.q_whole = qfi(rho, drho.m);
    const DensityMatrix rho_f = rho.qubit_dim == 1 ? rho : partial_trace(rho, Subsystem::field);
    const DensityMatrix drho_f =
        drho.qubit_dim == 1 ? drho : partial_trace(drho, Subsystem::field);
    out.q_field = qfi(rho_f, drho_f.m);

    const RealVector xs = auto_quadrature_grid(rho_f, quad_points).linspace();
    auto [phi, f_hom] = optimize_homodyne_angle(rho_f, drho_f, xs, default_angle_grid());
    out.angle_opt = phi;
    out.cfi_hom = f_hom;
    out.cfi_het = cfi_heterodyne(rho_f, drho_f, auto_amplitude_grid(rho_f, het_points));
    return out;
}

double performance_ratio(const ModelParams& params, const TruncationSpec& trunc, Scheme scheme) {
    SteadyStateSolver solver(params, trunc);
    const DensityMatrix& rho = solver.result().rho;
    const DensityMatrix drho = solver.drive_derivative();
    const DensityMatrix rho_f = partial_trace(rho, Subsystem::field);
    const DensityMatrix drho_f = partial_trace(drho, Subsystem::field);
    const double q_whole = qfi(rho, drho.m);

    double f = 0.0;
    if (scheme == Scheme::homodyne) {
        const RealVector xs = auto_quadrature_grid(rho_f).linspace();
        f = optimize_homodyne_angle(rho_f, drho_f, xs, default_angle_grid()).second;
    } else {
        f = cfi_heterodyne(rho_f, drho_f, auto_amplitude_grid(rho_f));
    }
    return f / q_whole;
}

} // namespace dsl
