#include "dsl/metrology.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dsl {

const char* to_string(Subsystem s) {
    switch (s) {
        case Subsystem::whole: return "whole";
        case Subsystem::field: return "field";
        default: return "qubit";
    }
}

SpectralDecomposition spectral(const DensityMatrix& rho) {
    Matrix h = 0.5 * (rho.m + rho.m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
    const long d = h.rows();
    SpectralDecomposition out;
    out.eigenvalues = eig.eigenvalues().reverse();
    out.eigenvectors = eig.eigenvectors().rowwise().reverse();
    (void)d;
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep) {
    rho.check_dims();
    const int nq = rho.qubit_dim, nf = rho.field_dim;
    if (keep == Subsystem::whole) return rho;
    if (keep == Subsystem::field) {
        Matrix out = Matrix::Zero(nf, nf);
        for (int q = 0; q < nq; ++q)
            out += rho.m.block(q * nf, q * nf, nf, nf);
        return DensityMatrix{std::move(out), 1, nf};
    }
    Matrix out = Matrix::Zero(nq, nq);
    for (int q = 0; q < nq; ++q)
        for (int p = 0; p < nq; ++p)
            out(q, p) = rho.m.block(q * nf, p * nf, nf, nf).trace();
    return DensityMatrix{std::move(out), nq, 1};
}

DensityMatrix rho_derivative(const ModelParams& params, const TruncationSpec& trunc) {
    return SteadyStateSolver(params, trunc).drive_derivative();
}

double qfi(const DensityMatrix& rho, const Matrix& drho, double eig_floor, double* skipped_mass) {
    if (rho.dim() != drho.rows() || drho.rows() != drho.cols())
        throw DimensionError("qfi: rho/drho dimension mismatch");
    const SpectralDecomposition sd = spectral(rho);
    const Matrix dh = 0.5 * (drho + drho.adjoint());
    const Matrix m = sd.eigenvectors.adjoint() * dh * sd.eigenvectors;
    const long d = m.rows();
    double q = 0.0, skipped = 0.0;
    for (long i = 0; i < d; ++i) {
        for (long j = 0; j < d; ++j) {
            const double denom = sd.eigenvalues(i) + sd.eigenvalues(j);
            const double w = std::norm(m(i, j));
            if (denom > eig_floor)
                q += 2.0 * w / denom;
            else
                skipped += w;
        }
    }
    if (skipped_mass) *skipped_mass = skipped;
    return q;
}

double cfi_discrete(const std::vector<double>& probs, const std::vector<double>& dprobs,
                    double prob_floor) {
    if (probs.size() != dprobs.size()) throw DimensionError("cfi_discrete: length mismatch");
    double sum = 0.0;
    for (double p : probs) {
        if (p < -1e-12) throw DomainError("cfi_discrete: negative probability");
        sum += p;
    }
    if (sum > 1.0 + 1e-9) throw DomainError("cfi_discrete: probabilities sum above 1");
    double f = 0.0;
    for (size_t k = 0; k < probs.size(); ++k)
        if (probs[k] >= prob_floor) f += dprobs[k] * dprobs[k] / probs[k];
    return f;
}

namespace {

double qfi_of(const SteadyStateSolver& solver, const DensityMatrix& drho, Subsystem s) {
    const DensityMatrix& rho = solver.result().rho;
    if (s == Subsystem::whole) return qfi(rho, drho.m);
    const DensityMatrix r = partial_trace(rho, s);
    const DensityMatrix d = partial_trace(drho, s);
    return qfi(r, d.m);
}

} // namespace

FisherAllResult fisher_all(const ModelParams& params, const TruncationSpec& trunc) {
    SteadyStateSolver solver(params, trunc);
    const DensityMatrix drho = solver.drive_derivative();
    FisherAllResult out;
    out.qfi_whole = qfi_of(solver, drho, Subsystem::whole);
    out.qfi_field = qfi_of(solver, drho, Subsystem::field);
    out.qfi_qubit = qfi_of(solver, drho, Subsystem::qubit);
    out.cutoff_used = solver.result().cutoff_used;
    out.residual = solver.result().residual;
    return out;
}

double fisher_subsystem(const ModelParams& params, const TruncationSpec& trunc, Subsystem s) {
    SteadyStateSolver solver(params, trunc);
    return qfi_of(solver, solver.drive_derivative(), s);
}

namespace {

// QFI evaluator that warm-starts the Fock cutoff from the previous solve,
// so sweeps do not re-discover the truncation at every point.
struct Evaluator {
    ModelParams base;
    TruncationSpec trunc;
    Subsystem subsystem;
    int evals = 0;

    double operator()(double drive, double detuning) {
        ModelParams p = base;
        p.drive = drive;
        p.detuning = detuning;
        SteadyStateSolver solver(p, trunc);
        trunc.n_max = std::max(trunc.n_max, solver.result().cutoff_used);
        ++evals;
        return qfi_of(solver, solver.drive_derivative(), subsystem);
    }
};

// Deterministic golden-section maximization on [lo, hi].
template <typename F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 >= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

void check_not_flat(double max_q, double min_q) {
    if (!(max_q / std::max(min_q, 1e-300) >= 1.0 + 1e-6))
        throw FlatLandscape("QFI landscape flat over the supplied grid");
}

} // namespace

OptimizeResult optimize_drive(const ModelParams& params_base, const TruncationSpec& trunc,
                              Subsystem subsystem, const std::vector<double>& drive_grid,
                              double drive_tol) {
    if (drive_grid.empty()) throw DomainError("optimize_drive: empty grid");
    Evaluator ev{params_base, trunc, subsystem};
    const double det = params_base.detuning;

    std::vector<double> q(drive_grid.size());
    for (size_t i = 0; i < drive_grid.size(); ++i) q[i] = ev(drive_grid[i], det);
    const auto it = std::max_element(q.begin(), q.end());
    check_not_flat(*it, *std::min_element(q.begin(), q.end()));
    const size_t i = static_cast<size_t>(it - q.begin());

    OptimizeResult best{drive_grid[i], det, q[i], 0};
    if (drive_grid.size() > 1) {
        const double lo = drive_grid[i == 0 ? 0 : i - 1];
        const double hi = drive_grid[std::min(i + 1, drive_grid.size() - 1)];
        auto [x, fx] = golden_max([&](double e) { return ev(e, det); }, lo, hi, drive_tol);
        if (fx > best.qfi) {
            best.drive = x;
            best.qfi = fx;
        }
    }
    best.evaluations = ev.evals;
    return best;
}

OptimizeResult optimize_drive_detuning(const ModelParams& params_base, const TruncationSpec& trunc,
                                       Subsystem subsystem,
                                       const std::vector<double>& detuning_grid,
                                       const std::vector<double>& drive_grid, double tol) {
    if (detuning_grid.empty() || drive_grid.empty())
        throw DomainError("optimize_drive_detuning: empty grid");
    if (detuning_grid.size() == 1) {
        ModelParams p = params_base;
        p.detuning = detuning_grid.front();
        OptimizeResult r = optimize_drive(p, trunc, subsystem, drive_grid, tol);
        r.detuning = detuning_grid.front();
        return r;
    }

    Evaluator ev{params_base, trunc, subsystem};
    double max_q = -std::numeric_limits<double>::infinity();
    double min_q = std::numeric_limits<double>::infinity();
    OptimizeResult best;
    for (double det : detuning_grid) {
        for (double e : drive_grid) {
            const double q = ev(e, det);
            min_q = std::min(min_q, q);
            if (q > max_q ||
                (q == max_q && (std::abs(det) < std::abs(best.detuning) ||
                                (std::abs(det) == std::abs(best.detuning) && e < best.drive)))) {
                max_q = q;
                best = OptimizeResult{e, det, q, 0};
            }
        }
    }
    check_not_flat(max_q, min_q);

    const double de_step = drive_grid.size() > 1 ? drive_grid[1] - drive_grid[0] : 0.0;
    const double dd_step = detuning_grid[1] - detuning_grid[0];
    const double det_lo = *std::min_element(detuning_grid.begin(), detuning_grid.end());
    const double det_hi = *std::max_element(detuning_grid.begin(), detuning_grid.end());
    const double drv_lo = *std::min_element(drive_grid.begin(), drive_grid.end());
    const double drv_hi = *std::max_element(drive_grid.begin(), drive_grid.end());

    double we = std::abs(de_step), wd = std::abs(dd_step);
    for (int cycle = 0; cycle < 2; ++cycle) {
        if (we > 0) {
            auto [x, fx] = golden_max([&](double e) { return ev(e, best.detuning); },
                                      std::max(drv_lo, best.drive - we),
                                      std::min(drv_hi, best.drive + we), tol);
            if (fx > best.qfi) {
                best.drive = x;
                best.qfi = fx;
            }
        }
        auto [y, fy] = golden_max([&](double d) { return ev(best.drive, d); },
                                  std::max(det_lo, best.detuning - wd),
                                  std::min(det_hi, best.detuning + wd), tol);
        if (fy > best.qfi) {
            best.detuning = y;
            best.qfi = fy;
        }
        we = 8 * tol;
        wd = 8 * tol;
    }
    best.evaluations = ev.evals;
    return best;
}

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points, double n_min) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : points)
        if (p.first > n_min) pts.push_back(p);
    if (pts.size() < 4) throw DomainError("fit_scaling: need >= 4 points with N > n_min");

    // initial guess from the log-log slope of (value - value_min) vs N
    const double vmin =
        std::min_element(pts.begin(), pts.end(),
                         [](auto& a, auto& b) { return a.second < b.second; })
            ->second;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int used = 0;
    for (const auto& [n, v] : pts) {
        const double shifted = v - vmin;
        if (shifted <= 0) continue;
        const double lx = std::log(n), ly = std::log(shifted);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++used;
    }
    double b = 1.0, a = 1.0;
    if (used >= 2 && used * sxx - sx * sx > 1e-12) {
        b = (used * sxy - sx * sy) / (used * sxx - sx * sx);
        a = std::exp((sy - b * sx) / used);
    }
    double c = vmin - a * std::pow(pts.front().first, b);

    // Levenberg-Marquardt on (a, b, c)
    auto rms = [&](double aa, double bb, double cc) {
        double s = 0;
        for (const auto& [n, v] : pts) {
            const double r = aa * std::pow(n, bb) + cc - v;
            s += r * r;
        }
        return std::sqrt(s / double(pts.size()));
    };
    double lambda = 1e-3;
    double cur = rms(a, b, c);
    bool converged = false;
    for (int iter = 0; iter < 400; ++iter) {
        Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
        Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
        for (const auto& [n, v] : pts) {
            const double nb = std::pow(n, b);
            const double r = a * nb + c - v;
            const Eigen::Vector3d j(nb, a * nb * std::log(n), 1.0);
            jtj += j * j.transpose();
            jtr += j * r;
        }
        Eigen::Matrix3d damped = jtj + lambda * jtj.diagonal().asDiagonal().toDenseMatrix();
        const Eigen::Vector3d step = damped.ldlt().solve(-jtr);
        if (!step.allFinite()) throw FitDiverged("fit_scaling: non-finite step");
        const double na = a + step(0), nb_ = b + step(1), nc = c + step(2);
        const double trial = rms(na, nb_, nc);
        if (std::isfinite(trial) && trial <= cur) {
            const double rel = step.norm() / (1.0 + std::abs(a) + std::abs(b) + std::abs(c));
            a = na;
            b = nb_;
            c = nc;
            cur = trial;
            lambda = std::max(lambda * 0.5, 1e-12);
            if (rel < 1e-12) {
                converged = true;
                break;
            }
        } else {
            lambda *= 4.0;
            if (lambda > 1e12) break;
        }
    }
    if (!converged && cur > 1e-6 * (1.0 + std::abs(vmin))) {
        // accept only if the final rms is already tiny; otherwise report failure
        if (lambda > 1e12) throw FitDiverged("fit_scaling: iteration cap / damping blow-up");
    }
    return ScalingFit{a, b, c, cur, n_min};
}

} // namespace dsl
