#include "dsl/model.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <string>
#include <vector>

namespace dsl {

ModelParams ModelParams::from_resource(double n_resource, double drive_over_g,
                                       double detuning_over_g) {
    if (n_resource <= 0) throw DomainError("from_resource: N must be > 0");
    ModelParams p;
    p.g = 1.0;
    p.kappa = 1.0 / (2.0 * std::sqrt(n_resource));
    p.drive = drive_over_g;
    p.detuning = detuning_over_g;
    return p;
}

Operator build_hamiltonian(const ModelParams& params, const TruncationSpec& trunc) {
    params.validate();
    trunc.validate();
    const Operator iq = qubit_identity();
    const Operator a_f = annihilation(trunc);
    const Operator n_f = number_operator(trunc);
    const Operator if_ = field_identity(trunc);

    const Matrix excited = tensor(sigma_plus(), if_).m * tensor(sigma_minus(), if_).m;
    const Matrix jc = tensor(sigma_plus(), a_f).m; // sigma+ a; h.c. is sigma- a^dag
    const Matrix a_c = tensor(iq, a_f).m;

    Matrix h = -params.detuning * (tensor(iq, n_f).m + excited) +
               params.g * (jc + jc.adjoint()) + params.drive * (a_c + a_c.adjoint());
    return Operator{std::move(h), Space::composite};
}

namespace {

SparseCMatrix sparse(const Matrix& m) {
    SparseCMatrix s = m.sparseView(1.0, 1e-300);
    s.makeCompressed();
    return s;
}

SparseCMatrix sparse_identity(long d) {
    SparseCMatrix s(d, d);
    s.setIdentity();
    return s;
}

// L for a Hamiltonian h and a single jump operator sqrt(2 kappa) a:
// -i (I (x) h - h^T (x) I) + kappa (2 conj(a) (x) a - I (x) a^dag a - (a^dag a)^T (x) I)
SparseCMatrix liouvillian_matrix(const SparseCMatrix& h, const SparseCMatrix& a, double kappa) {
    const long d = h.rows();
    const SparseCMatrix id = sparse_identity(d);
    const SparseCMatrix ht = SparseCMatrix(h.transpose());
    const SparseCMatrix ac = a.conjugate();
    const SparseCMatrix ada = SparseCMatrix(a.adjoint()) * a;
    const SparseCMatrix adat = SparseCMatrix(ada.transpose());

    SparseCMatrix l =
        Complex(0, -1) * (Eigen::kroneckerProduct(id, h) - Eigen::kroneckerProduct(ht, id)) +
        Complex(2.0 * kappa, 0) * Eigen::kroneckerProduct(ac, a) -
        Complex(kappa, 0) * (Eigen::kroneckerProduct(id, ada) + Eigen::kroneckerProduct(adat, id));
    l.makeCompressed();
    return l;
}

// Field-factor Hamiltonian for the g = 0 decoupled cavity.
Matrix field_hamiltonian(const ModelParams& params, const TruncationSpec& trunc) {
    const Operator a_f = annihilation(trunc);
    const Operator n_f = number_operator(trunc);
    return -params.detuning * n_f.m + params.drive * (a_f.m + a_f.m.adjoint());
}

SparseCMatrix drive_commutator(const SparseCMatrix& x) {
    const long d = x.rows();
    const SparseCMatrix id = sparse_identity(d);
    const SparseCMatrix xt = SparseCMatrix(x.transpose());
    SparseCMatrix g =
        Complex(0, -1) * (Eigen::kroneckerProduct(id, x) - Eigen::kroneckerProduct(xt, id));
    g.makeCompressed();
    return g;
}

// Replace row 0 of l with the vectorized trace functional.
SparseCMatrix with_trace_row(const SparseCMatrix& l) {
    const long side = l.rows();
    const long d = static_cast<long>(std::llround(std::sqrt(double(side))));
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(static_cast<size_t>(l.nonZeros()) + d);
    for (int k = 0; k < l.outerSize(); ++k)
        for (SparseCMatrix::InnerIterator it(l, k); it; ++it)
            if (it.row() != 0) trip.emplace_back(it.row(), it.col(), it.value());
    for (long i = 0; i < d; ++i) trip.emplace_back(0, i * (d + 1), Complex(1, 0));
    SparseCMatrix a(side, side);
    a.setFromTriplets(trip.begin(), trip.end());
    a.makeCompressed();
    return a;
}

struct ClipStats {
    double min_eigenvalue;
};

// Hermitize, trace-normalize and repair floating-point-level negativity:
// eigenvalues in [-1e-9, 0) are clipped to zero and the state renormalized;
// anything below -1e-9 means the solve failed.
Matrix repair_state(const Matrix& raw, ClipStats* stats = nullptr) {
    Matrix h = 0.5 * (raw + raw.adjoint());
    const double tr = h.trace().real();
    if (!(std::abs(tr) > 1e-300)) throw SingularSystem("steady state has zero trace");
    h /= tr;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
    RealVector vals = eig.eigenvalues();
    if (stats) stats->min_eigenvalue = vals.minCoeff();
    if (vals.minCoeff() < -1e-9)
        throw NonConvergence("steady state eigenvalue below -1e-9: " +
                             std::to_string(vals.minCoeff()));
    for (long i = 0; i < vals.size(); ++i)
        if (vals(i) < 0) vals(i) = 0;
    vals /= vals.sum();
    return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().adjoint();
}

} // namespace

Superoperator build_liouvillian(const ModelParams& params, const TruncationSpec& trunc) {
    const Operator h = build_hamiltonian(params, trunc);
    const SparseCMatrix a_c = sparse(tensor(qubit_identity(), annihilation(trunc)).m);
    return Superoperator{liouvillian_matrix(sparse(h.m), a_c, params.kappa)};
}

Superoperator build_drive_generator(const TruncationSpec& trunc) {
    trunc.validate();
    const Operator a_f = annihilation(trunc);
    Matrix x = tensor(qubit_identity(), a_f).m;
    x = (x + x.adjoint()).eval();
    return Superoperator{drive_commutator(sparse(x))};
}

struct SteadyStateSolver::Impl {
    ModelParams params;
    TruncationSpec trunc;
    double residual_tol;

    bool field_mode = false; // g == 0: solve on the field factor only
    int n_used = 0;
    SparseCMatrix l_clean;   // unmodified generator (solve-space)
    SparseCMatrix a_mod;     // trace-row-replaced system
    double l_norm = 0.0;
    Eigen::SparseLU<SparseCMatrix, Eigen::COLAMDOrdering<int>> lu;
    Matrix rho_solve;        // solve-space state (field factor when field_mode)
    SteadyStateResult result;

    void run() {
        int n = trunc.n_max;
        for (;;) {
            if (attempt(n)) return;
            if (n >= trunc.hard_cap)
                throw NonConvergence("Fock tail " + std::to_string(result.tail_population) +
                                     " above tolerance at hard cutoff cap " + std::to_string(n));
            n = std::min(trunc.hard_cap, std::max(n + 2, int(std::ceil(1.5 * n))));
        }
    }

    bool attempt(int n) {
        TruncationSpec cur = trunc;
        cur.n_max = n;
        field_mode = (params.g == 0.0);

        if (field_mode) {
            l_clean = liouvillian_matrix(sparse(field_hamiltonian(params, cur)),
                                         sparse(annihilation(cur).m), params.kappa);
        } else {
            l_clean = build_liouvillian(params, cur).m;
        }
        l_norm = l_clean.norm();
        a_mod = with_trace_row(l_clean);

        lu.compute(a_mod);
        if (lu.info() != Eigen::Success)
            throw SingularSystem("SparseLU factorization of the trace-constrained system failed");

        Vector rhs = Vector::Zero(a_mod.rows());
        rhs(0) = 1.0;
        Vector x = lu.solve(rhs);
        x += lu.solve(rhs - a_mod * x); // one step of iterative refinement

        rho_solve = repair_state(devectorize(x));
        const double residual = (l_clean * vectorize(rho_solve)).norm() / l_norm;
        if (residual > residual_tol)
            throw SingularSystem("steady-state residual " + std::to_string(residual) +
                                 " exceeds tolerance (degenerate Liouvillian?)");

        n_used = n;
        result.residual = residual;
        result.cutoff_used = n;
        result.rho = embed(rho_solve);
        result.tail_population = tail_population(result.rho, n);
        return result.tail_population <= trunc.tail_tol;
    }

    DensityMatrix embed(const Matrix& solve_state) const {
        if (!field_mode) return DensityMatrix{solve_state, 2, n_used};
        // decoupled qubit parked in |g> (index 1)
        Matrix full = Matrix::Zero(2 * n_used, 2 * n_used);
        full.block(n_used, n_used, n_used, n_used) = solve_state;
        return DensityMatrix{std::move(full), 2, n_used};
    }

    static double tail_population(const DensityMatrix& rho, int n) {
        double tail = 0.0;
        for (int q = 0; q < 2; ++q)
            for (int f = n - 2; f < n; ++f) tail += rho.m(q * n + f, q * n + f).real();
        return tail;
    }
};

SteadyStateSolver::SteadyStateSolver(const ModelParams& params, const TruncationSpec& trunc,
                                     double residual_tol)
    : impl_(std::make_unique<Impl>()) {
    params.validate();
    trunc.validate();
    impl_->params = params;
    impl_->trunc = trunc;
    impl_->residual_tol = residual_tol;
    impl_->run();
}

SteadyStateSolver::~SteadyStateSolver() = default;
SteadyStateSolver::SteadyStateSolver(SteadyStateSolver&&) noexcept = default;
SteadyStateSolver& SteadyStateSolver::operator=(SteadyStateSolver&&) noexcept = default;

const SteadyStateResult& SteadyStateSolver::result() const { return impl_->result; }

DensityMatrix SteadyStateSolver::drive_derivative() const {
    const Impl& s = *impl_;
    TruncationSpec cur = s.trunc;
    cur.n_max = s.n_used;

    SparseCMatrix dl;
    if (s.field_mode) {
        Matrix x = annihilation(cur).m;
        x = (x + x.adjoint()).eval();
        dl = drive_commutator(sparse(x));
    } else {
        dl = build_drive_generator(cur).m;
    }

    Vector b = -(dl * vectorize(s.rho_solve));
    b(0) = 0.0; // replaced row now enforces Tr drho = 0
    Vector x = s.lu.solve(b);
    x += s.lu.solve(b - s.a_mod * x);

    Matrix d = devectorize(x);
    d = 0.5 * (d + d.adjoint()).eval();
    const long dim = d.rows();
    d -= (d.trace() / double(dim)) * Matrix::Identity(dim, dim);

    if (!s.field_mode) return DensityMatrix{std::move(d), 2, s.n_used};
    Matrix full = Matrix::Zero(2 * s.n_used, 2 * s.n_used);
    full.block(s.n_used, s.n_used, s.n_used, s.n_used) = d;
    return DensityMatrix{std::move(full), 2, s.n_used};
}

SteadyStateResult steady_state(const ModelParams& params, const TruncationSpec& trunc) {
    return SteadyStateSolver(params, trunc).result();
}

std::pair<double, double> quasienergies(int n, double drive, double g) {
    if (n < 1) throw DomainError("quasienergies: n must be a positive integer");
    if (g <= 0) throw DomainError("quasienergies: g must be > 0");
    const double r = 2.0 * drive / g;
    if (r < 0 || r > 1)
        throw DomainError("quasienergies: requires 0 <= 2E/g <= 1 (spectrum is "
                          "continuous above threshold)");
    const double e = std::sqrt(double(n)) * g * std::pow(1.0 - r * r, 0.75);
    return {e, -e};
}

BlochVector qubit_bloch(const DensityMatrix& rho_qubit) {
    if (rho_qubit.dim() != 2) throw DimensionError("qubit_bloch: expected a 2x2 state");
    const Matrix& r = rho_qubit.m;
    return BlochVector{
        (sigma_x().m * r).trace().real(),
        (sigma_y().m * r).trace().real(),
        (sigma_z().m * r).trace().real(),
    };
}

} // namespace dsl
