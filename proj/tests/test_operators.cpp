#include <doctest.h>

#include <unsupported/Eigen/KroneckerProduct>

#include "dsl/operators.hpp"

using namespace dsl;

namespace {

Matrix random_matrix(int n, unsigned seed) {
    std::srand(seed);
    return Matrix::Random(n, n);
}

} // namespace

TEST_SUITE("operators") {

TEST_CASE("truncated ladder commutator") {
    TruncationSpec tr;
    tr.n_max = 12;
    const Matrix a = annihilation(tr).m;
    const Matrix comm = a * a.adjoint() - a.adjoint() * a;
    // [a, a^dag] = 1 on every level except the truncation corner
    for (int k = 0; k < tr.n_max - 1; ++k)
        CHECK(std::abs(comm(k, k) - 1.0) < 1e-14);
    CHECK(std::abs(comm(tr.n_max - 1, tr.n_max - 1) + (tr.n_max - 1.0)) < 1e-12);
    CHECK((comm - Matrix(comm.diagonal().asDiagonal())).norm() < 1e-14);
}

TEST_CASE("number operator matches a^dag a") {
    TruncationSpec tr;
    tr.n_max = 9;
    const Matrix n = number_operator(tr).m;
    const Matrix a = annihilation(tr).m;
    CHECK((n - a.adjoint() * a).norm() < 1e-13);
    CHECK(n(5, 5).real() == doctest::Approx(5.0));
}

TEST_CASE("qubit algebra and basis convention") {
    CHECK((sigma_plus().m * sigma_minus().m -
           (Matrix(2, 2) << 1, 0, 0, 0).finished())
              .norm() < 1e-15);
    CHECK(sigma_z().m(0, 0).real() == doctest::Approx(1.0)); // index 0 = |e>
    CHECK(sigma_z().m(1, 1).real() == doctest::Approx(-1.0));
    const Matrix xy = sigma_x().m * sigma_y().m;
    CHECK(std::abs(xy(0, 0) - Complex(0, 1)) < 1e-15); // sx sy = i sz
}

TEST_CASE("tensor is the Kronecker product with the qubit leading") {
    TruncationSpec tr;
    tr.n_max = 5;
    const Operator t = tensor(sigma_z(), field_identity(tr));
    for (int f = 0; f < tr.n_max; ++f) {
        CHECK(t.m(f, f).real() == doctest::Approx(1.0));               // |e> block first
        CHECK(t.m(tr.n_max + f, tr.n_max + f).real() == doctest::Approx(-1.0));
    }

    const Matrix a = random_matrix(2, 7), b = random_matrix(3, 8);
    const Matrix c = random_matrix(2, 9), d = random_matrix(3, 10);
    const Operator ab =
        tensor(Operator{a, Space::qubit}, Operator{b, Space::field});
    const Operator cd =
        tensor(Operator{c, Space::qubit}, Operator{d, Space::field});
    const Operator ac_bd = tensor(Operator{Matrix(a * c), Space::qubit},
                                  Operator{Matrix(b * d), Space::field});
    CHECK((ab.m * cd.m - ac_bd.m).norm() < 1e-12);
}

TEST_CASE("tensor rejects mismatched factor order") {
    TruncationSpec tr;
    tr.n_max = 4;
    CHECK_THROWS_AS(tensor(annihilation(tr), sigma_x()), DimensionError);
}

TEST_CASE("vectorization identity vec(A rho B) = (B^T kron A) vec(rho)") {
    const int n = 6;
    const Matrix a = random_matrix(n, 3), rho = random_matrix(n, 4), b = random_matrix(n, 5);
    const Vector lhs = vectorize(a * rho * b);
    const Matrix super = Eigen::kroneckerProduct(b.transpose(), a);
    CHECK((lhs - super * vectorize(rho)).norm() < 1e-12);
}

TEST_CASE("devectorize inverts vectorize and rejects non-square input") {
    const Matrix rho = random_matrix(5, 11);
    CHECK((devectorize(vectorize(rho)) - rho).norm() == 0.0);
    CHECK_THROWS_AS(devectorize(Vector::Zero(12)), DimensionError);
}

TEST_CASE("truncation spec validation") {
    TruncationSpec bad;
    bad.n_max = 1;
    CHECK_THROWS_AS(bad.validate(), DimensionError);
    bad.n_max = 8;
    bad.hard_cap = 4;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

} // TEST_SUITE
