#include "dsl/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace dsl {

namespace {

double uniform01(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

long nearest_index(const RealVector& xs, double x) {
    const double h = xs(1) - xs(0);
    long i = std::lround((x - xs(0)) / h);
    return std::clamp(i, 0L, long(xs.size() - 1));
}

} // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

BinnedDistribution discretize_pdf(const QuadratureDistribution& dist, double width,
                                  std::pair<double, double> range) {
    const long points = dist.grid.size();
    if (points < 3) throw DomainError("discretize_pdf: distribution grid too small");
    if (width <= 0) throw DomainError("discretize_pdf: width must be > 0");
    if (!(range.second > range.first)) throw RangeTooNarrow("discretize_pdf: empty range");

    const double h = (dist.grid(points - 1) - dist.grid(0)) / (points - 1);
    long steps = std::lround(width / h);
    if (steps % 2 != 0) ++steps; // Simpson needs an even interval count per bin
    steps = std::max(steps, 2L);

    const long i_lo = nearest_index(dist.grid, range.first);
    const long i_hi = nearest_index(dist.grid, range.second);
    const long n_bins = (i_hi - i_lo) / steps;
    if (n_bins < 2) throw RangeTooNarrow("discretize_pdf: fewer than 2 bins fit the range");

    BinnedDistribution out;
    out.bin_width = steps * h;
    out.edges.resize(n_bins + 1);
    out.probs.resize(n_bins);
    for (long b = 0; b <= n_bins; ++b) out.edges(b) = dist.grid(i_lo + b * steps);

    for (long b = 0; b < n_bins; ++b) {
        const long base = i_lo + b * steps;
        double s = dist.density(base) + dist.density(base + steps);
        for (long k = 1; k < steps; ++k)
            s += (k % 2 ? 4.0 : 2.0) * dist.density(base + k);
        out.probs(b) = std::max(s * h / 3.0, 0.0);
    }
    out.covered_mass = out.probs.sum();
    return out;
}

MeasurementRecord sample_counts(const BinnedDistribution& binned, long long shots,
                                std::uint64_t seed) {
    if (shots <= 0) throw DomainError("sample_counts: shots must be > 0");
    if (binned.covered_mass <= 0) throw DomainError("sample_counts: zero total mass");
    const long m = binned.probs.size();

    std::vector<double> cdf(m);
    double acc = 0.0;
    for (long b = 0; b < m; ++b) {
        acc += binned.probs(b) / binned.covered_mass;
        cdf[b] = acc;
    }
    cdf[m - 1] = 1.0;

    MeasurementRecord rec;
    rec.edges = binned.edges;
    rec.counts.assign(m, 0);
    rec.shots = shots;
    rec.seed = seed;
    std::mt19937_64 rng(seed);
    for (long long s = 0; s < shots; ++s) {
        const double u = uniform01(rng);
        const long b = std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
        ++rec.counts[std::min(b, m - 1)];
    }
    return rec;
}

namespace {

void check_edges(const RealVector& a, const RealVector& b, const char* where) {
    if (a.size() != b.size()) throw EdgeMismatch(std::string(where) + ": edge count mismatch");
    for (long i = 0; i < a.size(); ++i)
        if (std::abs(a(i) - b(i)) > 1e-9)
            throw EdgeMismatch(std::string(where) + ": edge values differ");
}

} // namespace

double log_likelihood(const BinnedDistribution& model, const MeasurementRecord& record) {
    check_edges(model.edges, record.edges, "log_likelihood");
    double ll = 0.0;
    for (size_t b = 0; b < record.counts.size(); ++b)
        if (record.counts[b] > 0)
            ll += double(record.counts[b]) * std::log(std::max(model.probs(long(b)), 1e-300));
    return ll;
}

Posterior posterior(const RealVector& candidates, const RealVector& prior,
                    const std::vector<BinnedDistribution>& models,
                    const MeasurementRecord& record) {
    const long n = candidates.size();
    if (prior.size() != n || long(models.size()) != n)
        throw DimensionError("posterior: candidates/prior/models length mismatch");
    if (prior.minCoeff() < 0) throw DomainError("posterior: negative prior weight");
    if (prior.sum() <= 0) throw DomainError("posterior: prior sums to zero");

    Posterior out;
    out.candidates = candidates;
    out.log_weights.resize(n);
    for (long k = 0; k < n; ++k) {
        out.log_weights(k) = prior(k) > 0
                                 ? std::log(prior(k)) + log_likelihood(models[k], record)
                                 : -std::numeric_limits<double>::infinity();
    }
    const double top = out.log_weights.maxCoeff();
    if (!std::isfinite(top)) throw AllZeroPosterior("posterior: all weights vanished");
    out.log_weights.array() -= top;
    out.weights = out.log_weights.array().exp();
    const double z = out.weights.sum();
    if (!(z > 0) || !std::isfinite(z)) throw AllZeroPosterior("posterior: normalization failed");
    out.weights /= z;

    long best = 0;
    for (long k = 1; k < n; ++k)
        if (out.log_weights(k) > out.log_weights(best)) best = k;
    out.map_estimate = candidates(best);
    out.mean = (out.weights.array() * candidates.array()).sum();
    out.variance = (out.weights.array() * (candidates.array() - out.mean).square()).sum();
    return out;
}

ExperimentResult run_experiments(const ModelParams& params_true, const TruncationSpec& trunc,
                                 const ExperimentConfig& cfg) {
    params_true.validate();
    if (cfg.n_experiments < 2) throw DomainError("run_experiments: need >= 2 experiments");
    if (cfg.n_candidates < 3 || cfg.n_candidates % 2 == 0)
        throw DomainError("run_experiments: n_candidates must be odd and >= 3");

    SteadyStateSolver solver(params_true, trunc);
    TruncationSpec warm = trunc;
    warm.n_max = std::max(warm.n_max, solver.result().cutoff_used);
    const DensityMatrix rho_f = partial_trace(solver.result().rho, Subsystem::field);
    const DensityMatrix drho_f = partial_trace(solver.drive_derivative(), Subsystem::field);
    const double q_whole = qfi(solver.result().rho, solver.drive_derivative().m);

    const RealVector scan = auto_quadrature_grid(rho_f).linspace();
    const double angle = optimize_homodyne_angle(rho_f, drho_f, scan, default_angle_grid()).first;

    // bin range covering 1 - range_tail of the true model, rounded out to
    // whole bins
    const QuadratureDistribution ref = quadrature_pdf(rho_f, angle, scan);
    const long np = scan.size();
    const double h = (scan(np - 1) - scan(0)) / (np - 1);
    RealVector cum(np);
    double acc = 0.0;
    for (long k = 0; k < np; ++k) {
        acc += (k == 0 || k == np - 1 ? 0.5 : 1.0) * h * ref.density(k);
        cum(k) = acc;
    }
    const double tail = 0.5 * cfg.range_tail;
    double lo = scan(0), hi = scan(np - 1);
    for (long k = 0; k < np; ++k)
        if (cum(k) < tail) lo = scan(k);
    for (long k = np - 1; k >= 0; --k)
        if (acc - cum(k) < tail) hi = scan(k);
    lo = std::floor(lo / cfg.bin_width) * cfg.bin_width;
    hi = std::ceil(hi / cfg.bin_width) * cfg.bin_width;
    const long n_bins = std::lround((hi - lo) / cfg.bin_width);
    if (n_bins < 2) throw RangeTooNarrow("run_experiments: bin range collapsed");

    // fine grid with 8 Simpson steps per bin, aligned so edges are exact
    const long steps = 8;
    const RealVector xs = RealVector::LinSpaced(n_bins * steps + 1, lo, hi);

    ExperimentResult out;
    out.angle = angle;
    out.qfi_whole = q_whole;
    out.qcrb = 1.0 / (double(cfg.shots) * q_whole);
    out.candidates = RealVector::LinSpaced(cfg.n_candidates,
                                           params_true.drive * (1.0 - cfg.half_width_frac),
                                           params_true.drive * (1.0 + cfg.half_width_frac));
    const long mid = (cfg.n_candidates - 1) / 2;
    out.candidates(mid) = params_true.drive;

    std::vector<BinnedDistribution> models(cfg.n_candidates);
    for (long k = 0; k < cfg.n_candidates; ++k) {
        ModelParams p = params_true;
        p.drive = out.candidates(k);
        SteadyStateSolver s(p, warm);
        warm.n_max = std::max(warm.n_max, s.result().cutoff_used);
        const DensityMatrix rf = partial_trace(s.result().rho, Subsystem::field);
        models[k] = discretize_pdf(quadrature_pdf(rf, angle, xs), cfg.bin_width, {lo, hi});
    }

    const RealVector prior = RealVector::Constant(cfg.n_candidates, 1.0 / cfg.n_candidates);
    out.map_estimates.reserve(cfg.n_experiments);
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < cfg.n_experiments; ++i) {
        const MeasurementRecord rec =
            sample_counts(models[mid], cfg.shots, derive_seed(cfg.seed, std::uint64_t(i)));
        const Posterior post = posterior(out.candidates, prior, models, rec);
        out.map_estimates.push_back(post.map_estimate);
        sum += post.map_estimate;
        sum2 += post.map_estimate * post.map_estimate;
    }
    const double n = double(cfg.n_experiments);
    out.variance = (sum2 - sum * sum / n) / (n - 1.0);
    return out;
}

void export_record_csv(const MeasurementRecord& record, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ConfigError("export_record_csv: cannot open " + path);
    f << "edge_lo,edge_hi,count\n";
    char buf[128];
    for (size_t b = 0; b < record.counts.size(); ++b) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%lld\n", record.edges(long(b)),
                      record.edges(long(b) + 1), record.counts[b]);
        f << buf;
    }
    if (!f) throw ConfigError("export_record_csv: write failed for " + path);
}

MeasurementRecord import_record_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("import_record_csv: cannot open " + path);
    std::string line;
    if (!std::getline(f, line) || line.rfind("edge_lo,edge_hi,count", 0) != 0)
        throw ConfigError("import_record_csv: missing header in " + path);

    std::vector<double> lo, hi;
    std::vector<long long> counts;
    int lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string a, b, c;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c))
            throw ConfigError("import_record_csv: bad row at line " + std::to_string(lineno));
        try {
            lo.push_back(std::stod(a));
            hi.push_back(std::stod(b));
            counts.push_back(std::stoll(c));
        } catch (const std::exception&) {
            throw ConfigError("import_record_csv: unparsable number at line " +
                              std::to_string(lineno));
        }
    }
    if (counts.size() < 2) throw ConfigError("import_record_csv: fewer than 2 bins");

    const double width = hi[0] - lo[0];
    MeasurementRecord rec;
    rec.edges.resize(long(counts.size()) + 1);
    rec.edges(0) = lo[0];
    for (size_t b = 0; b < counts.size(); ++b) {
        if (b > 0 && std::abs(lo[b] - hi[b - 1]) > 1e-9)
            throw EdgeMismatch("import_record_csv: bins are not contiguous");
        if (std::abs((hi[b] - lo[b]) - width) > 1e-9)
            throw EdgeMismatch("import_record_csv: bins are not uniform");
        if (counts[b] < 0) throw DomainError("import_record_csv: negative count");
        rec.edges(long(b) + 1) = hi[b];
        rec.shots += counts[b];
    }
    rec.counts = std::move(counts);
    return rec;
}

} // namespace dsl
