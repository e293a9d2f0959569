// Acceptance gate: one checkable statement per criterion, each printing a
// single [PASS]/[FAIL] line with the measured numbers. Criteria are selected
// by number on the command line; exit status 1 if any selected one fails.

#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dsl/cli/recipes.hpp"
#include "dsl/cli/runner.hpp"
#include "dsl/diagnostics.hpp"
#include "dsl/estimation.hpp"
#include "dsl/phase_space.hpp"

using namespace dsl;

namespace {

constexpr double kPi = 3.14159265358979323846;

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * double(rng() >> 11) * 0x1.0p-53;
}

void report(int criterion, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

TruncationSpec trunc_default() { return TruncationSpec{}; }

// ---- criterion 1: decoupled-cavity analytic oracle -------------------------

bool criterion1() {
    ModelParams p;
    p.g = 0.0;
    p.kappa = 0.25;
    p.drive = 0.6;
    p.detuning = 0.15;
    TruncationSpec tr;
    tr.n_max = 32;

    const Complex alpha = Complex(0, -1) * p.drive / Complex(p.kappa, -p.detuning);
    const SteadyStateResult ss = steady_state(p, tr);
    const DensityMatrix rho_f = partial_trace(ss.rho, Subsystem::field);
    Vector coh(rho_f.dim());
    coh(0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < rho_f.dim(); ++n) coh(n) = coh(n - 1) * alpha / std::sqrt(double(n));
    const double fid = (coh.adjoint() * rho_f.m * coh)(0).real();

    const double q_exact = 4.0 / (p.kappa * p.kappa + p.detuning * p.detuning);
    const double q = qfi(ss.rho, rho_derivative(p, tr).m);
    const double q_err = std::abs(q - q_exact) / q_exact;

    const double f_hom = optimize_homodyne_angle(p, tr, default_angle_grid()).second;
    const double f_err = std::abs(f_hom - q_exact) / q_exact;

    const bool ok = fid >= 1.0 - 1e-8 && q_err <= 1e-6 && f_err <= 1e-4;
    report(1, ok,
           fmt("g=0 oracle: fidelity %.12f (>= 1 - 1e-8), QFI rel err %.3e (<= 1e-6), "
               "optimal-homodyne CFI rel err %.3e (<= 1e-4)",
               fid, q_err, f_err));
    return ok;
}

// ---- criterion 2: quasienergy collapse at threshold -------------------------

bool criterion2() {
    double worst = 0.0;
    for (int n = 1; n <= 10; ++n) {
        const auto [ep, em] = quasienergies(n, 0.5, 1.0); // 2E = g exactly
        worst = std::max({worst, std::abs(ep), std::abs(em)});
    }
    const bool ok = worst == 0.0;
    report(2, ok, fmt("quasienergies at 2E = g, n in 1..10: max |E| = %.3e (exact 0 required)",
                      worst));
    return ok;
}

// ---- criterion 3: CRB ordering suite ----------------------------------------

bool criterion3() {
    std::mt19937_64 rng(301);
    const double slack = 1e-8;
    double worst = -1.0; // most violated relative margin
    int held = 0;
    std::string first_fail;
    for (int k = 0; k < 50; ++k) {
        const double n_res = uniform(rng, 5.0, 40.0);
        const double drive = uniform(rng, 0.1, 0.6);
        const double det = uniform(rng, -0.5, 0.5);
        const ModelParams p = ModelParams::from_resource(n_res, drive, det);
        TruncationSpec tr = trunc_default();

        SteadyStateSolver solver(p, tr);
        const DensityMatrix drho = solver.drive_derivative();
        const MeasurementAnalysis ma = analyze_measurements(solver.result().rho, drho, 1201, 121);
        const double q_qubit = qfi(partial_trace(solver.result().rho, Subsystem::qubit),
                                   partial_trace(drho, Subsystem::qubit).m);

        const double checks[4][2] = {{ma.q_field, ma.q_whole},
                                     {q_qubit, ma.q_whole},
                                     {ma.cfi_hom, ma.q_field},
                                     {ma.cfi_het, ma.q_field}};
        bool point_ok = true;
        for (const auto& c : checks) {
            const double margin = (c[0] - c[1]) / std::max(c[1], 1e-30);
            worst = std::max(worst, margin);
            if (margin > slack) point_ok = false;
        }
        if (point_ok)
            ++held;
        else if (first_fail.empty())
            first_fail = fmt(" first violation at N=%.2f E=%.3f D=%.3f", n_res, drive, det);
    }
    const bool ok = held == 50;
    report(3, ok,
           fmt("CRB orderings held at %d/50 random points, worst relative margin %.3e "
               "(slack 1e-8)%s",
               held, worst, first_fail.c_str()));
    return ok;
}

// ---- criteria 4 and 5: shared on/off-resonance optimization table -----------

struct OptTable {
    // keyed by resource N
    std::map<double, OptimizeResult> whole_on, field_on, qubit_on, whole_off;
};

std::vector<double> make_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    return g;
}

const OptTable& opt_table() {
    static const OptTable table = [] {
        OptTable t;
        const std::vector<double> ns = {20, 25, 30, 35, 40, 48, 56};
        const std::vector<double> grid_high = make_grid(0.30, 0.75, 10); // whole/field peaks
        const std::vector<double> grid_low = make_grid(0.25, 0.60, 8);   // qubit peak
        const std::vector<double> det_grid = {0.06, 0.09, 0.12};
        const std::vector<double> off_grid = make_grid(0.30, 0.475, 8);
        for (double n : ns) {
            const ModelParams base = ModelParams::from_resource(n, 0.0, 0.0);
            TruncationSpec tr = trunc_default();
            t.whole_on[n] = optimize_drive(base, tr, Subsystem::whole, grid_high, 1e-3);
            t.field_on[n] = optimize_drive(base, tr, Subsystem::field, grid_high, 1e-3);
            t.qubit_on[n] = optimize_drive(base, tr, Subsystem::qubit, grid_low, 1e-3);
            t.whole_off[n] =
                optimize_drive_detuning(base, tr, Subsystem::whole, det_grid, off_grid, 1e-3);
            std::fprintf(stderr,
                         "  [table] N=%g: whole E*=%.4f Q=%.1f | qubit E*=%.4f Q=%.1f | "
                         "off-res (D=%.4f, E=%.4f) Q=%.1f\n",
                         n, t.whole_on[n].drive, t.whole_on[n].qfi, t.qubit_on[n].drive,
                         t.qubit_on[n].qfi, t.whole_off[n].detuning, t.whole_off[n].drive,
                         t.whole_off[n].qfi);
        }
        return t;
    }();
    return table;
}

bool criterion4() {
    const OptTable& t = opt_table();
    const double ns[] = {20, 30, 40, 56};
    bool monotone = true;
    std::string seq;
    double prev = -1.0;
    for (double n : ns) {
        const double e = t.whole_on.at(n).drive;
        if (e <= prev) monotone = false;
        prev = e;
        seq += fmt("%s%.4f", seq.empty() ? "" : ", ", e);
    }
    const double e56 = t.whole_on.at(56.0).drive;
    const bool band = e56 >= 0.42 && e56 <= 0.50;
    const bool ok = monotone && band;
    report(4, ok,
           fmt("whole-system (E/g)* over N={20,30,40,56} = [%s]; monotone increasing: %s; "
               "(E/g)*(56) = %.4f in [0.42, 0.50]: %s",
               seq.c_str(), monotone ? "yes" : "no", e56, band ? "yes" : "no"));
    return ok;
}

bool criterion5() {
    const OptTable& t = opt_table();
    auto fit_of = [&](const std::map<double, OptimizeResult>& m) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& [n, r] : m) pts.emplace_back(n, r.qfi);
        return fit_scaling(pts, 19.0); // all seven points, N >= 20
    };
    const ScalingFit fq = fit_of(t.qubit_on);
    const ScalingFit fw = fit_of(t.whole_on);
    const ScalingFit ff = fit_of(t.field_on);

    bool off_beats_on = true;
    for (const auto& [n, r] : t.whole_off)
        if (r.qfi <= t.whole_on.at(n).qfi) off_beats_on = false;

    const bool bq = fq.b >= 1.10 && fq.b <= 1.40;
    const bool bw = fw.b >= 0.85 && fw.b <= 1.15;
    const bool bf = ff.b >= 0.85 && ff.b <= 1.15;
    const bool ok = bq && bw && bf && off_beats_on;
    report(5, ok,
           fmt("scaling exponents: qubit B=%.3f in [1.10,1.40]: %s; whole B=%.3f, field "
               "B=%.3f in [0.85,1.15]: %s/%s; off-resonance maxima exceed on-resonance at "
               "all 7 N: %s",
               fq.b, bq ? "yes" : "no", fw.b, ff.b, bw ? "yes" : "no", bf ? "yes" : "no",
               off_beats_on ? "yes" : "no"));
    return ok;
}

// ---- criterion 6: spectral vs fidelity finite-difference QFI ----------------

bool criterion6() {
    std::mt19937_64 rng(601);
    double worst = 0.0;
    int agreed = 0;
    for (int k = 0; k < 10; ++k) {
        const double n_res = uniform(rng, 3.0, 15.0);
        const double drive = uniform(rng, 0.1, 0.6);
        const double det = uniform(rng, -0.3, 0.3);
        const ModelParams p = ModelParams::from_resource(n_res, drive, det);
        TruncationSpec tr = trunc_default();

        const SteadyStateResult ss = steady_state(p, tr);
        const double q = qfi(ss.rho, rho_derivative(p, tr).m);

        const double dt = 0.01 / std::sqrt(q + 10.0);
        const TruncationSpec fixed{ss.cutoff_used, 1.0, 160};
        ModelParams pp = p, pm = p;
        pp.drive += dt;
        pm.drive -= dt;
        const double fp = fidelity(ss.rho, steady_state(pp, fixed).rho);
        const double fm = fidelity(ss.rho, steady_state(pm, fixed).rho);
        const double q_fd = 4.0 * ((1 - fp) + (1 - fm)) / (dt * dt);

        const double rel = std::abs(q_fd - q) / q;
        worst = std::max(worst, rel);
        if (rel <= 0.01) ++agreed;
    }
    const bool ok = agreed == 10;
    report(6, ok,
           fmt("spectral vs fidelity-FD QFI agreed within 1%% at %d/10 random points "
               "(worst rel dev %.3e)",
               agreed, worst));
    return ok;
}

// ---- criterion 7: phase-space consistency -----------------------------------

bool criterion7() {
    std::mt19937_64 rng(701);
    double worst_marg = 0.0, worst_int = 0.0;
    for (int k = 0; k < 10; ++k) {
        const double n_res = uniform(rng, 5.0, 30.0);
        const double drive = uniform(rng, 0.1, 0.6);
        const double det = uniform(rng, -0.3, 0.3);
        const ModelParams p = ModelParams::from_resource(n_res, drive, det);
        const SteadyStateResult ss = steady_state(p, trunc_default());
        const DensityMatrix rho_f = partial_trace(ss.rho, Subsystem::field);

        const PhaseSpaceGrid grid = auto_amplitude_grid(rho_f, 201);
        const WignerResult wr = wigner(rho_f, grid);
        worst_int = std::max(worst_int, std::abs(wr.integral - 1.0));

        const RealVector xs = grid.linspace();
        const QuadratureDistribution qd = quadrature_pdf(rho_f, 0.0, xs);
        const double h = grid.spacing();
        for (int i = 0; i < grid.points; ++i) {
            double marg = 0.0;
            for (int j = 0; j < grid.points; ++j)
                marg += ((j == 0 || j == grid.points - 1) ? 0.5 : 1.0) * h * wr.w(i, j);
            worst_marg = std::max(worst_marg, std::abs(marg - qd.density(i)));
        }
    }

    double w_min = 0.0;
    for (double drive : {0.3, 0.5, 0.7}) {
        const ModelParams p = ModelParams::from_resource(25.0, drive, 0.0);
        const DensityMatrix rho_f =
            partial_trace(steady_state(p, trunc_default()).rho, Subsystem::field);
        const WignerResult wr = wigner(rho_f, auto_amplitude_grid(rho_f, 201));
        w_min = std::min(w_min, wr.w.minCoeff());
    }

    const bool ok = worst_marg <= 1e-4 && worst_int <= 1e-3 && w_min >= -1e-9;
    report(7, ok,
           fmt("Wigner: marginal sup dev %.3e (<= 1e-4), worst |iint W - 1| %.3e (<= 1e-3), "
               "min W at N=25 E in {0.3,0.5,0.7} = %.3e (>= -1e-9)",
               worst_marg, worst_int, w_min));
    return ok;
}

// ---- criterion 8: optimal homodyne angle bands -------------------------------

bool criterion8() {
    // on resonance at g/kappa = 10 (N = 25), near-critical drive
    const ModelParams p_on = ModelParams::from_resource(25.0, 0.66, 0.0);
    const double phi_on =
        optimize_homodyne_angle(p_on, trunc_default(), default_angle_grid()).first;
    const bool on_ok = std::abs(phi_on - kPi / 2) <= 0.1;

    // off resonance across g/kappa in [6, 16]: fixed detuning on the ridge,
    // drive optimized per ratio (the angle is evaluated at each ratio's own
    // operating point, not at one frozen drive)
    double lo = kPi, hi = 0.0;
    bool off_ok = true;
    for (double ratio : {6.0, 8.0, 10.0, 12.0, 14.0, 16.0}) {
        const double n_res = ratio * ratio / 4.0; // N = (g / 2 kappa)^2
        ModelParams p = ModelParams::from_resource(n_res, 0.0, 0.09);
        p.drive = optimize_drive(p, trunc_default(), Subsystem::whole,
                                 make_grid(0.28, 0.46, 7), 2e-3)
                      .drive;
        const double phi =
            optimize_homodyne_angle(p, trunc_default(), default_angle_grid()).first;
        lo = std::min(lo, phi);
        hi = std::max(hi, phi);
        if (phi < kPi / 2 - 0.1 || phi > 3 * kPi / 4 + 0.1) off_ok = false;
    }
    const bool ok = on_ok && off_ok;
    report(8, ok,
           fmt("phi* on-resonance (N=25) = %.4f, |phi* - pi/2| = %.4f (<= 0.1): %s; "
               "off-resonance phi* in [%.4f, %.4f] over g/kappa in [6,16], band "
               "[pi/2 - 0.1, 3pi/4 + 0.1]: %s",
               phi_on, std::abs(phi_on - kPi / 2), on_ok ? "yes" : "no", lo, hi,
               off_ok ? "yes" : "no"));
    return ok;
}

// ---- criterion 9: measurement performance ratios -----------------------------

bool criterion9() {
    const std::vector<double> det_grid = {0.06, 0.09, 0.12};
    const std::vector<double> drive_grid = make_grid(0.30, 0.475, 8);

    bool hom_ok = true;
    std::string ratios;
    for (double n : {20.0, 30.0, 40.0}) {
        const ModelParams base = ModelParams::from_resource(n, 0.0, 0.0);
        const OptimizeResult opt = optimize_drive_detuning(
            base, trunc_default(), Subsystem::whole, det_grid, drive_grid, 1e-3);
        ModelParams p = base;
        p.drive = opt.drive;
        p.detuning = opt.detuning;
        const double r = performance_ratio(p, trunc_default(), Scheme::homodyne);
        ratios += fmt("%sN=%g: %.4f", ratios.empty() ? "" : ", ", n, r);
        if (r < 0.9) hom_ok = false;
    }

    const ModelParams base10 = ModelParams::from_resource(10.0, 0.0, 0.0);
    const OptimizeResult opt10 = optimize_drive_detuning(
        base10, trunc_default(), Subsystem::whole, det_grid, drive_grid, 1e-3);
    ModelParams p10 = base10;
    p10.drive = opt10.drive;
    p10.detuning = opt10.detuning;
    const double hom10 = performance_ratio(p10, trunc_default(), Scheme::homodyne);
    const double het10 = performance_ratio(p10, trunc_default(), Scheme::heterodyne);
    const bool het_ok = het10 <= hom10;

    const bool ok = hom_ok && het_ok;
    report(9, ok,
           fmt("off-resonance homodyne F/Q at optimum {%s} (all >= 0.9: %s); N=10 "
               "heterodyne %.4f <= homodyne %.4f: %s",
               ratios.c_str(), hom_ok ? "yes" : "no", het10, hom10, het_ok ? "yes" : "no"));
    return ok;
}

// ---- criterion 10: Bayesian near-saturation ----------------------------------

bool criterion10() {
    const std::vector<double> grid = make_grid(0.40, 0.75, 8);
    bool ok = true;
    std::string detail;
    for (double n : {10.0, 20.0, 30.0}) {
        const ModelParams base = ModelParams::from_resource(n, 0.0, 0.0);
        TruncationSpec tr = trunc_default();
        ModelParams p = base;
        p.drive = optimize_drive(base, tr, Subsystem::whole, grid, 1e-3).drive;

        ExperimentConfig cfg;
        cfg.n_experiments = 100;
        cfg.shots = 1000;
        cfg.seed = 1000 + std::uint64_t(n);
        const ExperimentResult res = run_experiments(p, tr, cfg);

        // SE of a sample variance over n_e experiments: Var * sqrt(2/(n_e-1))
        const double se = res.variance * std::sqrt(2.0 / (cfg.n_experiments - 1));
        const bool above = res.variance + 3.0 * se >= res.qcrb;
        const bool below = res.variance <= 2.5 * res.qcrb;
        if (!(above && below)) ok = false;
        detail += fmt("%sN=%g: Var/QCRB=%.3f%s", detail.empty() ? "" : ", ", n,
                      res.variance / res.qcrb, (above && below) ? "" : " (out of envelope)");
    }
    report(10, ok,
           fmt("Bayesian envelope (100 x 1000 shots): {%s}; require Var >= QCRB - 3 SE and "
               "Var <= 2.5 QCRB",
               detail.c_str()));
    return ok;
}

// ---- criterion 11: reproducibility of the CLI -------------------------------

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> dir_contents(const std::filesystem::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".csv")
            out[e.path().filename().string()] = slurp(e.path());
    return out;
}

bool criterion11() {
    namespace fs = std::filesystem;
    // one cheap recipe per output style: plain sweep, angle sweep, bayes exports
    const std::vector<std::string> names = {"fig1a", "figS2a", "figS4b"};
    bool ok = true;
    std::string detail;
    for (const std::string& name : names) {
        const cli::Recipe& recipe = cli::find_recipe(name);
        std::map<std::string, std::string> runs[3];
        int rcs[3] = {0, 0, 0};
        for (int pass = 0; pass < 3; ++pass) {
            const fs::path out =
                fs::temp_directory_path() / ("dsl_accept11_" + name + "_" + std::to_string(pass));
            fs::remove_all(out);
            cli::RunOptions opts;
            opts.command = recipe.command;
            opts.config = recipe.parsed();
            opts.out_dir = out.string();
            if (pass == 2) opts.workers = 3; // parallel must match serial
            rcs[pass] = cli::run(opts);
            runs[pass] = dir_contents(out);
            fs::remove_all(out);
        }
        const bool match = rcs[0] == 0 && rcs[1] == 0 && rcs[2] == 0 &&
                           runs[0] == runs[1] && runs[0] == runs[2] && !runs[0].empty();
        if (!match) ok = false;
        detail += fmt("%s%s: %s (%zu files)", detail.empty() ? "" : ", ", name.c_str(),
                      match ? "identical" : "MISMATCH", runs[0].size());
    }
    report(11, ok, fmt("rerun and parallel CSV bytes: %s", detail.c_str()));
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
    if (wanted.empty())
        for (int c = 1; c <= 11; ++c) wanted.insert(c);

    bool (*const fns[])(void) = {criterion1, criterion2, criterion3, criterion4,
                                 criterion5, criterion6, criterion7, criterion8,
                                 criterion9, criterion10, criterion11};
    bool all_ok = true;
    for (int c : wanted) {
        if (c < 1 || c > 11) {
            std::fprintf(stderr, "unknown criterion %d\n", c);
            return 2;
        }
        if (!fns[c - 1]()) all_ok = false;
    }
    return all_ok ? 0 : 1;
}
