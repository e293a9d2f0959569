#include <doctest.h>

#include <cmath>

#include "dsl/diagnostics.hpp"
#include "dsl/metrology.hpp"

using namespace dsl;

namespace {

DensityMatrix coherent_field(Complex alpha, int n_max) {
    Vector v(n_max);
    v(0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < n_max; ++n) v(n) = v(n - 1) * alpha / std::sqrt(double(n));
    return DensityMatrix{v * v.adjoint(), 1, n_max};
}

} // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("log negativity of Bell-like and product states") {
    // (|e,0> + |g,1>)/sqrt(2) embedded in qubit x 3-level field
    const int nf = 3;
    Vector bell = Vector::Zero(2 * nf);
    bell(0) = 1.0 / std::sqrt(2.0);      // |e> (x) |0>
    bell(nf + 1) = 1.0 / std::sqrt(2.0); // |g> (x) |1>
    const DensityMatrix rho_bell{bell * bell.adjoint(), 2, nf};
    CHECK(log_negativity(rho_bell) == doctest::Approx(1.0).epsilon(1e-12));

    // pure product state carries no entanglement
    Vector prod = Vector::Zero(2 * nf);
    prod(0) = std::sqrt(0.7);
    prod(1) = std::sqrt(0.3);
    const DensityMatrix rho_prod{prod * prod.adjoint(), 2, nf};
    CHECK(log_negativity(rho_prod) == 0.0);

    // maximally mixed state is separable
    const DensityMatrix mixed{Matrix::Identity(2 * nf, 2 * nf) / double(2 * nf), 2, nf};
    CHECK(log_negativity(mixed) == 0.0);
}

TEST_CASE("log negativity interpolates for partially entangled pure states") {
    // cos t |e,0> + sin t |g,1>: E_N = log2(1 + sin 2t)
    const int nf = 2;
    for (double t : {0.2, 0.5, 0.7}) {
        Vector v = Vector::Zero(2 * nf);
        v(0) = std::cos(t);
        v(nf + 1) = std::sin(t);
        const DensityMatrix rho{v * v.adjoint(), 2, nf};
        CHECK(log_negativity(rho) ==
              doctest::Approx(std::log2(1.0 + std::sin(2 * t))).epsilon(1e-12));
    }
}

TEST_CASE("purity extremes") {
    const DensityMatrix pure = coherent_field(Complex(0.8, 0.1), 20);
    CHECK(purity(pure) == doctest::Approx(1.0).epsilon(1e-12));
    const int d = 6;
    const DensityMatrix mixed{Matrix::Identity(d, d) / double(d), 1, d};
    CHECK(purity(mixed) == doctest::Approx(1.0 / d).epsilon(1e-14));
}

TEST_CASE("fidelity axioms and the coherent-state overlap") {
    const DensityMatrix a = coherent_field(Complex(0.5, 0.2), 24);
    const DensityMatrix b = coherent_field(Complex(-0.4, 0.9), 24);
    CHECK(fidelity(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fidelity(a, b) == doctest::Approx(fidelity(b, a)).epsilon(1e-7));
    // pure states: F = |<alpha|beta>| = exp(-|alpha - beta|^2 / 2)
    const double expect = std::exp(-0.5 * std::norm(Complex(0.5, 0.2) - Complex(-0.4, 0.9)));
    CHECK(fidelity(a, b) == doctest::Approx(expect).epsilon(1e-7));

    // orthogonal states
    Matrix p0 = Matrix::Zero(3, 3), p1 = Matrix::Zero(3, 3);
    p0(0, 0) = 1;
    p1(1, 1) = 1;
    CHECK(fidelity(DensityMatrix{p0, 1, 3}, DensityMatrix{p1, 1, 3}) ==
          doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("fidelity curvature approximates the QFI for a small drive step") {
    const ModelParams p = ModelParams::from_resource(6.0, 0.4, 0.0);
    TruncationSpec tr;
    tr.n_max = 24;
    const SteadyStateResult ss = steady_state(p, tr);
    const double q = qfi(ss.rho, rho_derivative(p, tr).m);
    const double dt = 0.01 / std::sqrt(q);
    ModelParams pp = p, pm = p;
    pp.drive += dt;
    pm.drive -= dt;
    const TruncationSpec fixed{ss.cutoff_used, 1.0, 160};
    const double fp = fidelity(ss.rho, steady_state(pp, fixed).rho);
    const double fm = fidelity(ss.rho, steady_state(pm, fixed).rho);
    const double q_fd = 4.0 * ((1 - fp) + (1 - fm)) / (dt * dt);
    CHECK(q_fd == doctest::Approx(q).epsilon(1e-2));
}

TEST_CASE("compute_diagnostics on a driven steady state") {
    const ModelParams p = ModelParams::from_resource(9.0, 0.45, 0.0);
    TruncationSpec tr;
    tr.n_max = 20;
    const SteadyStateResult ss = steady_state(p, tr);
    const StateDiagnostics d = compute_diagnostics(ss.rho);
    CHECK(d.log_neg > 0.0);     // the JC interaction entangles qubit and field
    CHECK(d.purity > 0.0);
    CHECK(d.purity <= 1.0 + 1e-12);
    CHECK(d.mean_photons > 0.0);
    CHECK(std::abs(d.bloch.sy) < 1e-8); // on resonance
    const double r = std::sqrt(d.bloch.sx * d.bloch.sx + d.bloch.sy * d.bloch.sy +
                               d.bloch.sz * d.bloch.sz);
    CHECK(r <= 1.0 + 1e-10);
}

TEST_CASE("log negativity rejects a field-only state") {
    const DensityMatrix field = coherent_field(Complex(0.3, 0.0), 8);
    CHECK_THROWS_AS(log_negativity(field), DimensionError);
}

} // TEST_SUITE
