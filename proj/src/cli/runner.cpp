#include "dsl/cli/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "dsl/cli/csv.hpp"
#include "dsl/diagnostics.hpp"
#include "dsl/estimation.hpp"

namespace dsl::cli {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Row {
    double n = kNaN, drive = kNaN, detuning = kNaN, angle = kNaN;
    double x = kNaN, p = kNaN; // wigner layout only
    std::string subsystem;
    std::string quantity;
    double value = kNaN;
    double residual = kNaN;
    long cutoff = -1;
    std::uint64_t seed = 0;
    std::string reason;
};

struct Task {
    Row proto; // grid-point coordinates for failure reporting
    std::function<std::vector<Row>(std::uint64_t seed)> fn;
};

struct Failure {
    long task = 0;
    double n = kNaN, drive = kNaN, detuning = kNaN;
    std::string reason;
};

std::string fmt_cell(double v) { return format_double(v); }

std::string opt_cell(double v) { return std::isnan(v) ? std::string() : format_double(v); }

std::string hash_hex(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---- config helpers ------------------------------------------------------

std::vector<double> range_or(const ConfigFile& cfg, const std::string& sec,
                             const std::string& key, std::vector<double> fallback) {
    return cfg.has(sec, key) ? parse_range(cfg, sec, key) : std::move(fallback);
}

double double_or(const ConfigFile& cfg, const std::string& sec, const std::string& key,
                 double fallback) {
    return cfg.has(sec, key) ? parse_double(cfg, sec, key) : fallback;
}

int int_or(const ConfigFile& cfg, const std::string& sec, const std::string& key, int fallback) {
    return cfg.has(sec, key) ? parse_int(cfg, sec, key) : fallback;
}

TruncationSpec trunc_from(const ConfigFile& cfg, const std::string& sec) {
    TruncationSpec t;
    t.n_max = int_or(cfg, sec, "n_max", t.n_max);
    t.tail_tol = double_or(cfg, sec, "tail_tol", t.tail_tol);
    t.hard_cap = int_or(cfg, sec, "hard_cap", t.hard_cap);
    t.validate();
    return t;
}

std::vector<Subsystem> subsystems_from(const ConfigFile& cfg, const std::string& sec) {
    if (!cfg.has(sec, "subsystems"))
        return {Subsystem::whole, Subsystem::field, Subsystem::qubit};
    std::vector<Subsystem> out;
    for (const std::string& name : parse_list(cfg, sec, "subsystems")) {
        if (name == "whole")
            out.push_back(Subsystem::whole);
        else if (name == "field")
            out.push_back(Subsystem::field);
        else if (name == "qubit")
            out.push_back(Subsystem::qubit);
        else
            throw ConfigError(cfg.path + ": unknown subsystem '" + name + "'");
    }
    return out;
}

// ---- task execution ------------------------------------------------------

struct ExecResult {
    std::vector<Row> rows;
    std::vector<Failure> failures;
};

ExecResult execute(const std::vector<Task>& tasks, int workers, std::uint64_t base_seed) {
    std::vector<std::vector<Row>> results(tasks.size());
    std::vector<Failure> failures;
    std::mutex fail_mutex;
    std::atomic<size_t> next{0};

    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const std::uint64_t seed = derive_seed(base_seed, i);
            try {
                results[i] = tasks[i].fn(seed);
                for (Row& r : results[i]) r.seed = seed;
            } catch (const std::exception& e) {
                Row r = tasks[i].proto;
                r.value = kNaN;
                r.reason = e.what();
                r.seed = seed;
                results[i] = {r};
                std::lock_guard<std::mutex> lock(fail_mutex);
                failures.push_back(
                    Failure{long(i), r.n, r.drive, r.detuning, e.what()});
            }
        }
    };

    const int k = std::max(1, std::min<int>(workers, int(tasks.size())));
    std::vector<std::thread> pool;
    for (int t = 0; t < k; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    ExecResult out;
    for (auto& rs : results)
        out.rows.insert(out.rows.end(), rs.begin(), rs.end());
    std::sort(failures.begin(), failures.end(),
              [](const Failure& a, const Failure& b) { return a.task < b.task; });
    out.failures = std::move(failures);
    return out;
}

// ---- command task builders -----------------------------------------------

struct GridPoint {
    double n, drive, detuning;
    ModelParams params() const { return ModelParams::from_resource(n, drive, detuning); }
};

std::vector<GridPoint> grid_points(const ConfigFile& cfg, const std::string& sec) {
    const std::vector<double> ns = parse_range(cfg, sec, "resource");
    const std::vector<double> es = parse_range(cfg, sec, "drive");
    const std::vector<double> ds = range_or(cfg, sec, "detuning", {0.0});
    std::vector<GridPoint> out;
    for (double n : ns)
        for (double d : ds)
            for (double e : es) out.push_back(GridPoint{n, e, d});
    return out;
}

Row point_row(const GridPoint& gp) {
    Row r;
    r.n = gp.n;
    r.drive = gp.drive;
    r.detuning = gp.detuning;
    return r;
}

Row make_row(const Row& proto, const SteadyStateResult& ss, Subsystem sub,
             const std::string& quantity, double value) {
    Row r = proto;
    r.subsystem = to_string(sub);
    r.quantity = quantity;
    r.value = value;
    r.residual = ss.residual;
    r.cutoff = ss.cutoff_used;
    return r;
}

std::vector<Task> build_steady(const ConfigFile& cfg, const std::string& sec,
                               const TruncationSpec& trunc) {
    std::vector<Task> tasks;
    for (const GridPoint& gp : grid_points(cfg, sec)) {
        const Row proto = point_row(gp);
        tasks.push_back(Task{proto, [gp, proto, trunc](std::uint64_t) {
            SteadyStateSolver solver(gp.params(), trunc);
            const SteadyStateResult& ss = solver.result();
            const StateDiagnostics diag = compute_diagnostics(ss.rho);
            return std::vector<Row>{
                make_row(proto, ss, Subsystem::field, "mean_photons", diag.mean_photons),
                make_row(proto, ss, Subsystem::whole, "purity", diag.purity),
                make_row(proto, ss, Subsystem::whole, "tail_population", ss.tail_population),
            };
        }});
    }
    return tasks;
}

std::vector<Task> build_qfi_sweep(const ConfigFile& cfg, const std::string& sec,
                                  const TruncationSpec& trunc) {
    const std::vector<Subsystem> subs = subsystems_from(cfg, sec);
    std::vector<Task> tasks;
    for (const GridPoint& gp : grid_points(cfg, sec)) {
        const Row proto = point_row(gp);
        tasks.push_back(Task{proto, [gp, proto, trunc, subs](std::uint64_t) {
            const ModelParams p = gp.params();
            SteadyStateSolver solver(p, trunc);
            const DensityMatrix drho = solver.drive_derivative();
            std::vector<Row> rows;
            for (Subsystem s : subs) {
                const DensityMatrix r = partial_trace(solver.result().rho, s);
                const DensityMatrix d = partial_trace(drho, s);
                rows.push_back(make_row(proto, solver.result(), s, "scaled_qfi",
                                        p.g * p.g * qfi(r, d.m)));
            }
            return rows;
        }});
    }
    return tasks;
}

std::vector<Task> build_bloch(const ConfigFile& cfg, const std::string& sec,
                              const TruncationSpec& trunc) {
    std::vector<Task> tasks;
    for (const GridPoint& gp : grid_points(cfg, sec)) {
        const Row proto = point_row(gp);
        tasks.push_back(Task{proto, [gp, proto, trunc](std::uint64_t) {
            SteadyStateSolver solver(gp.params(), trunc);
            const BlochVector b =
                qubit_bloch(partial_trace(solver.result().rho, Subsystem::qubit));
            const SteadyStateResult& ss = solver.result();
            return std::vector<Row>{
                make_row(proto, ss, Subsystem::qubit, "sigma_x", b.sx),
                make_row(proto, ss, Subsystem::qubit, "sigma_y", b.sy),
                make_row(proto, ss, Subsystem::qubit, "sigma_z", b.sz),
            };
        }});
    }
    return tasks;
}

std::vector<Task> build_diagnostics(const ConfigFile& cfg, const std::string& sec,
                                    const TruncationSpec& trunc) {
    std::vector<Task> tasks;
    for (const GridPoint& gp : grid_points(cfg, sec)) {
        const Row proto = point_row(gp);
        tasks.push_back(Task{proto, [gp, proto, trunc](std::uint64_t) {
            SteadyStateSolver solver(gp.params(), trunc);
            const StateDiagnostics diag = compute_diagnostics(solver.result().rho);
            const SteadyStateResult& ss = solver.result();
            return std::vector<Row>{
                make_row(proto, ss, Subsystem::whole, "log_negativity", diag.log_neg),
                make_row(proto, ss, Subsystem::whole, "purity", diag.purity),
                make_row(proto, ss, Subsystem::field, "mean_photons", diag.mean_photons),
            };
        }});
    }
    return tasks;
}

std::vector<Task> build_wigner(const ConfigFile& cfg, const std::string& sec,
                               const TruncationSpec& trunc) {
    const int points = int_or(cfg, sec, "points", 201);
    if (points < 32) throw ConfigError(cfg.path + ": wigner needs points >= 32");
    std::vector<Task> tasks;
    for (const GridPoint& gp : grid_points(cfg, sec)) {
        const Row proto = point_row(gp);
        tasks.push_back(Task{proto, [gp, proto, trunc, points](std::uint64_t) {
            SteadyStateSolver solver(gp.params(), trunc);
            const DensityMatrix rho_f = partial_trace(solver.result().rho, Subsystem::field);
            const PhaseSpaceGrid grid = auto_amplitude_grid(rho_f, points);
            const WignerResult wr = wigner(rho_f, grid);
            const RealVector xs = grid.linspace();
            std::vector<Row> rows;
            rows.reserve(size_t(points) * points);
            for (int i = 0; i < points; ++i) {
                for (int j = 0; j < points; ++j) {
                    Row r = proto;
                    r.x = xs(i);
                    r.p = xs(j);
                    r.value = wr.w(i, j);
                    r.residual = solver.result().residual;
                    r.cutoff = solver.result().cutoff_used;
                    if (!wr.coverage_ok) r.reason = "wigner grid coverage below 1 - 1e-3";
                    rows.push_back(std::move(r));
                }
            }
            return rows;
        }});
    }
    return tasks;
}

std::vector<Task> build_homodyne(const ConfigFile& cfg, const std::string& sec,
                                 const TruncationSpec& trunc) {
    std::vector<double> angles;
    if (cfg.has(sec, "angles")) angles = parse_range(cfg, sec, "angles");
    const int points = int_or(cfg, sec, "points", 801);
    std::vector<Task> tasks;
    for (const GridPoint& gp : grid_points(cfg, sec)) {
        const Row proto = point_row(gp);
        tasks.push_back(Task{proto, [gp, proto, trunc, angles, points](std::uint64_t) {
            const ModelParams p = gp.params();
            SteadyStateSolver solver(p, trunc);
            const DensityMatrix drho = solver.drive_derivative();
            const DensityMatrix rho_f = partial_trace(solver.result().rho, Subsystem::field);
            const DensityMatrix drho_f = partial_trace(drho, Subsystem::field);
            const RealVector xs = auto_quadrature_grid(rho_f, points).linspace();
            const double g2 = p.g * p.g;
            std::vector<Row> rows;
            if (!angles.empty()) {
                for (double phi : angles) {
                    Row r = make_row(proto, solver.result(), Subsystem::field,
                                     "scaled_cfi_homodyne",
                                     g2 * cfi_homodyne(rho_f, drho_f, phi, xs));
                    r.angle = phi;
                    rows.push_back(std::move(r));
                }
            } else {
                const auto [phi, f] =
                    optimize_homodyne_angle(rho_f, drho_f, xs, default_angle_grid());
                const double q_whole = qfi(solver.result().rho, drho.m);
                rows.push_back(
                    make_row(proto, solver.result(), Subsystem::field, "angle_opt", phi));
                Row r = make_row(proto, solver.result(), Subsystem::field,
                                 "scaled_cfi_homodyne", g2 * f);
                r.angle = phi;
                rows.push_back(std::move(r));
                rows.push_back(make_row(proto, solver.result(), Subsystem::field,
                                        "performance_ratio", f / q_whole));
            }
            return rows;
        }});
    }
    return tasks;
}

std::vector<Task> build_heterodyne(const ConfigFile& cfg, const std::string& sec,
                                   const TruncationSpec& trunc) {
    const int points = int_or(cfg, sec, "points", 201);
    std::vector<Task> tasks;
    for (const GridPoint& gp : grid_points(cfg, sec)) {
        const Row proto = point_row(gp);
        tasks.push_back(Task{proto, [gp, proto, trunc, points](std::uint64_t) {
            const ModelParams p = gp.params();
            SteadyStateSolver solver(p, trunc);
            const DensityMatrix drho = solver.drive_derivative();
            const DensityMatrix rho_f = partial_trace(solver.result().rho, Subsystem::field);
            const DensityMatrix drho_f = partial_trace(drho, Subsystem::field);
            const double f = cfi_heterodyne(rho_f, drho_f, auto_amplitude_grid(rho_f, points));
            const double q_whole = qfi(solver.result().rho, drho.m);
            return std::vector<Row>{
                make_row(proto, solver.result(), Subsystem::field, "scaled_cfi_heterodyne",
                         p.g * p.g * f),
                make_row(proto, solver.result(), Subsystem::field, "performance_ratio",
                         f / q_whole),
            };
        }});
    }
    return tasks;
}

std::vector<Task> build_optimize(const ConfigFile& cfg, const std::string& sec,
                                 const TruncationSpec& trunc, bool with_detuning_rows) {
    const std::vector<double> ns = parse_range(cfg, sec, "resource");
    const std::vector<double> drive_grid = parse_range(cfg, sec, "drive");
    const std::vector<double> detuning_grid = range_or(cfg, sec, "detuning", {0.0});
    const std::vector<Subsystem> subs = subsystems_from(cfg, sec);
    std::vector<Task> tasks;
    for (double n : ns) {
        for (Subsystem s : subs) {
            Row proto;
            proto.n = n;
            proto.subsystem = to_string(s);
            tasks.push_back(
                Task{proto, [n, s, proto, trunc, drive_grid, detuning_grid,
                             with_detuning_rows](std::uint64_t) {
                    const ModelParams base = ModelParams::from_resource(n, 0.0, 0.0);
                    const OptimizeResult opt = optimize_drive_detuning(
                        base, trunc, s, detuning_grid, drive_grid);
                    std::vector<Row> rows;
                    Row r = proto;
                    r.quantity = "drive_opt";
                    r.value = opt.drive;
                    rows.push_back(r);
                    if (with_detuning_rows) {
                        r.quantity = "detuning_opt";
                        r.value = opt.detuning;
                        rows.push_back(r);
                    }
                    r.quantity = "scaled_qfi_max";
                    r.value = opt.qfi; // g = 1 in the dimensionless gauge
                    r.drive = opt.drive;
                    r.detuning = opt.detuning;
                    rows.push_back(r);
                    return rows;
                }});
        }
    }
    return tasks;
}

std::vector<Task> build_bayes(const ConfigFile& cfg, const std::string& sec,
                              const TruncationSpec& trunc, const std::string& out_dir) {
    const std::vector<double> ns = parse_range(cfg, sec, "resource");
    const std::vector<double> detunings = range_or(cfg, sec, "detuning", {0.0});
    if (detunings.size() != 1 && detunings.size() != ns.size())
        throw ConfigError(cfg.path + ": bayes detuning must be scalar or match resource");

    std::vector<double> drives;
    std::vector<double> drive_grid;
    if (cfg.has(sec, "drive")) {
        drives = parse_range(cfg, sec, "drive");
        if (drives.size() != 1 && drives.size() != ns.size())
            throw ConfigError(cfg.path + ": bayes drive must be scalar or match resource");
    } else if (cfg.has(sec, "drive_grid")) {
        drive_grid = parse_range(cfg, sec, "drive_grid");
    } else {
        throw ConfigError(cfg.path + ": bayes needs 'drive' or 'drive_grid'");
    }

    ExperimentConfig ecfg;
    ecfg.n_experiments = int_or(cfg, sec, "experiments", 100);
    ecfg.shots = int_or(cfg, sec, "shots", 1000);
    ecfg.n_candidates = int_or(cfg, sec, "candidates", 201);
    ecfg.half_width_frac = double_or(cfg, sec, "half_width", 0.10);
    ecfg.bin_width = double_or(cfg, sec, "bin_width", 0.1);
    std::vector<double> export_shots;
    if (cfg.has(sec, "export_records")) export_shots = parse_range(cfg, sec, "export_records");
    const bool export_pdf = int_or(cfg, sec, "export_pdf", 0) != 0;
    const bool export_bins = int_or(cfg, sec, "export_bins", 0) != 0;
    if (ecfg.n_experiments == 0 && export_shots.empty() && !export_pdf && !export_bins)
        throw ConfigError(cfg.path + ": bayes with experiments = 0 must export something");

    std::vector<Task> tasks;
    for (size_t k = 0; k < ns.size(); ++k) {
        const double n = ns[k];
        const double det = detunings.size() == 1 ? detunings[0] : detunings[k];
        const double fixed_drive =
            drives.empty() ? kNaN : (drives.size() == 1 ? drives[0] : drives[k]);
        Row proto;
        proto.n = n;
        proto.detuning = det;
        proto.subsystem = "field";
        tasks.push_back(Task{proto, [n, det, fixed_drive, proto, trunc, drive_grid, ecfg,
                                     export_shots, export_pdf, export_bins,
                                     out_dir](std::uint64_t seed) {
            ModelParams p = ModelParams::from_resource(n, 0.0, det);
            if (std::isnan(fixed_drive)) {
                p.drive = optimize_drive(p, trunc, Subsystem::whole, drive_grid).drive;
            } else {
                p.drive = fixed_drive * p.g; // dimensionless input, g = 1
            }

            std::vector<Row> rows;
            Row r = proto;
            r.drive = p.drive / p.g;
            r.quantity = "drive_star";
            r.value = p.drive / p.g;
            rows.push_back(r);

            if (!export_shots.empty() || export_pdf || export_bins) {
                SteadyStateSolver solver(p, trunc);
                const DensityMatrix rho_f =
                    partial_trace(solver.result().rho, Subsystem::field);
                const DensityMatrix drho_f =
                    partial_trace(solver.drive_derivative(), Subsystem::field);
                const RealVector scan = auto_quadrature_grid(rho_f).linspace();
                const double phi =
                    optimize_homodyne_angle(rho_f, drho_f, scan, default_angle_grid()).first;
                const QuadratureDistribution dist = quadrature_pdf(rho_f, phi, scan);
                char tag[64];
                std::snprintf(tag, sizeof tag, "N%g", n);
                if (export_pdf) {
                    CsvTable t;
                    t.header = {"x", "density"};
                    for (long i = 0; i < scan.size(); ++i)
                        t.rows.push_back(
                            {format_double(scan(i)), format_double(dist.density(i))});
                    write_csv(t, out_dir + "/pdf_" + tag + ".csv");
                }
                if (!export_shots.empty() || export_bins) {
                    const BinnedDistribution bins = discretize_pdf(
                        dist, ecfg.bin_width, {scan(0), scan(scan.size() - 1)});
                    if (export_bins) {
                        CsvTable t;
                        t.header = {"edge_lo", "edge_hi", "prob"};
                        for (long b = 0; b < bins.probs.size(); ++b)
                            t.rows.push_back({format_double(bins.edges(b)),
                                              format_double(bins.edges(b + 1)),
                                              format_double(bins.probs(b))});
                        write_csv(t, out_dir + "/bins_" + tag + ".csv");
                    }
                    for (size_t j = 0; j < export_shots.size(); ++j) {
                        const long long m = static_cast<long long>(export_shots[j]);
                        const MeasurementRecord rec =
                            sample_counts(bins, m, derive_seed(seed, j));
                        export_record_csv(rec, out_dir + "/record_" + tag + "_M" +
                                                   std::to_string(m) + ".csv");
                    }
                }
            }

            if (ecfg.n_experiments > 0) {
                ExperimentConfig run_cfg = ecfg;
                run_cfg.seed = seed;
                const ExperimentResult res = run_experiments(p, trunc, run_cfg);
                r.angle = res.angle;
                r.quantity = "angle_opt";
                r.value = res.angle;
                rows.push_back(r);
                r.quantity = "scaled_qfi_whole";
                r.value = p.g * p.g * res.qfi_whole;
                rows.push_back(r);
                r.quantity = "variance_map";
                r.value = res.variance / (p.g * p.g);
                rows.push_back(r);
                r.quantity = "qcrb";
                r.value = res.qcrb / (p.g * p.g);
                rows.push_back(r);
            }
            return rows;
        }});
    }
    return tasks;
}

// ---- output writers -------------------------------------------------------

CsvTable generic_table(const std::vector<Row>& rows, const std::string& hash) {
    CsvTable t;
    t.header = {"N",          "drive",       "detuning", "angle",       "subsystem",
                "quantity",   "value",       "residual", "cutoff_used", "seed",
                "config_hash", "version",    "reason"};
    for (const Row& r : rows)
        t.rows.push_back({opt_cell(r.n), opt_cell(r.drive), opt_cell(r.detuning),
                          opt_cell(r.angle), r.subsystem, r.quantity, fmt_cell(r.value),
                          opt_cell(r.residual), r.cutoff < 0 ? "" : std::to_string(r.cutoff),
                          std::to_string(r.seed), hash, kVersion, r.reason});
    return t;
}

CsvTable wigner_table(const std::vector<Row>& rows, const std::string& hash) {
    CsvTable t;
    t.header = {"N",    "drive",       "detuning", "x",    "p",
                "w",    "residual",    "cutoff_used", "seed", "config_hash",
                "version", "reason"};
    for (const Row& r : rows)
        t.rows.push_back({opt_cell(r.n), opt_cell(r.drive), opt_cell(r.detuning), opt_cell(r.x),
                          opt_cell(r.p), fmt_cell(r.value), opt_cell(r.residual),
                          r.cutoff < 0 ? "" : std::to_string(r.cutoff), std::to_string(r.seed),
                          hash, kVersion, r.reason});
    return t;
}

json scaling_fits(const ConfigFile& cfg, const std::string& sec,
                  const std::vector<Row>& rows) {
    const double n_min = double_or(cfg, sec, "fit_n_min", 20.0);
    std::map<std::string, std::vector<std::pair<double, double>>> pts;
    for (const Row& r : rows)
        if (r.quantity == "scaled_qfi_max" && !std::isnan(r.value))
            pts[r.subsystem].push_back({r.n, r.value});
    json fits = json::object();
    for (const auto& [sub, data] : pts) {
        try {
            const ScalingFit f = fit_scaling(data, n_min);
            fits[sub] = {{"a", f.a}, {"b", f.b}, {"c", f.c},
                         {"rms_residual", f.rms_residual}, {"n_min", f.n_min_used}};
        } catch (const std::exception& e) {
            fits[sub] = {{"error", e.what()}};
        }
    }
    return fits;
}

} // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {
        "steady",   "qfi-sweep", "wigner",     "bloch-sweep", "optimize",
        "scaling",  "homodyne",  "heterodyne", "bayes",       "diagnostics"};
    return names;
}

int run(const RunOptions& opts) {
    namespace fs = std::filesystem;
    try {
        const auto& names = command_names();
        if (std::find(names.begin(), names.end(), opts.command) == names.end())
            throw ConfigError("unknown command '" + opts.command + "'");

        const ConfigFile cfg =
            opts.config ? *opts.config : parse_config(opts.config_path);
        const std::string& sec = opts.command;
        if (!cfg.sections.count(sec))
            throw ConfigError(cfg.path + ": missing section [" + sec + "]");

        const std::uint64_t seed =
            opts.seed ? *opts.seed
                      : (cfg.has("run", "seed") ? parse_u64(cfg, "run", "seed") : 0);
        const int workers =
            opts.workers ? *opts.workers
                         : (cfg.has("run", "workers") ? parse_int(cfg, "run", "workers") : 1);
        if (workers < 1) throw ConfigError("workers must be >= 1");
        const std::string out_dir =
            opts.out_dir ? *opts.out_dir
                         : (cfg.has("run", "out") ? cfg.at("run", "out").text
                                                  : std::string("out"));

        const TruncationSpec trunc = trunc_from(cfg, sec);

        // everything validated before anything is written
        std::vector<Task> tasks;
        if (sec == "steady") tasks = build_steady(cfg, sec, trunc);
        else if (sec == "qfi-sweep") tasks = build_qfi_sweep(cfg, sec, trunc);
        else if (sec == "wigner") tasks = build_wigner(cfg, sec, trunc);
        else if (sec == "bloch-sweep") tasks = build_bloch(cfg, sec, trunc);
        else if (sec == "optimize") tasks = build_optimize(cfg, sec, trunc, true);
        else if (sec == "scaling") tasks = build_optimize(cfg, sec, trunc, false);
        else if (sec == "homodyne") tasks = build_homodyne(cfg, sec, trunc);
        else if (sec == "heterodyne") tasks = build_heterodyne(cfg, sec, trunc);
        else if (sec == "diagnostics") tasks = build_diagnostics(cfg, sec, trunc);
        else if (sec == "bayes") tasks = build_bayes(cfg, sec, trunc, out_dir);
        if (tasks.empty()) throw ConfigError(cfg.path + ": empty task grid");

        fs::create_directories(out_dir);
        const ExecResult res = execute(tasks, workers, seed);
        const std::string hash = hash_hex(config_hash(cfg));

        const std::string csv_path = out_dir + "/" + sec + ".csv";
        write_csv(sec == "wigner" ? wigner_table(res.rows, hash)
                                  : generic_table(res.rows, hash),
                  csv_path);

        json summary = {
            {"schema_version", kSchemaVersion},
            {"artifact_version", kVersion},
            {"command", sec},
            {"config_hash", hash},
            {"seed", seed},
            {"workers", workers},
            {"rows", res.rows.size()},
            {"failures", res.failures.size()},
            {"outputs", {csv_path}},
        };
        if (sec == "scaling") summary["fits"] = scaling_fits(cfg, sec, res.rows);
        if (sec == "optimize" || sec == "bayes") {
            json pts = json::array();
            for (const Row& r : res.rows)
                if (!std::isnan(r.value))
                    pts.push_back({{"N", r.n}, {"subsystem", r.subsystem},
                                   {"quantity", r.quantity}, {"value", r.value}});
            summary["results"] = pts;
        }
        {
            std::ofstream f(out_dir + "/" + sec + ".summary.json", std::ios::binary);
            f << summary.dump(2) << "\n";
        }
        {
            json manifest = {{"command", sec}, {"failures", json::array()}};
            for (const Failure& fl : res.failures)
                manifest["failures"].push_back({{"task", fl.task}, {"N", fl.n},
                                                {"drive", fl.drive}, {"detuning", fl.detuning},
                                                {"reason", fl.reason}});
            std::ofstream f(out_dir + "/run.failures.json", std::ios::binary);
            f << manifest.dump(2) << "\n";
        }
        return res.failures.empty() ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace dsl::cli
