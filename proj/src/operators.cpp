#include "dsl/operators.hpp"

#include <cmath>

namespace dsl {

namespace {
Operator make_qubit(std::initializer_list<Complex> entries) {
    Operator op;
    op.m = Matrix::Zero(2, 2);
    auto it = entries.begin();
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) op.m(r, c) = *it++;
    op.tag = Space::qubit;
    return op;
}
} // namespace

Operator sigma_plus() { return make_qubit({0, 1, 0, 0}); }
Operator sigma_minus() { return make_qubit({0, 0, 1, 0}); }
Operator sigma_x() { return make_qubit({0, 1, 1, 0}); }
Operator sigma_y() { return make_qubit({0, Complex(0, -1), Complex(0, 1), 0}); }
Operator sigma_z() { return make_qubit({1, 0, 0, -1}); }
Operator qubit_identity() { return make_qubit({1, 0, 0, 1}); }

Operator annihilation(const TruncationSpec& trunc) {
    trunc.validate();
    Operator op;
    op.m = Matrix::Zero(trunc.n_max, trunc.n_max);
    for (int n = 1; n < trunc.n_max; ++n) op.m(n - 1, n) = std::sqrt(double(n));
    op.tag = Space::field;
    return op;
}

Operator creation(const TruncationSpec& trunc) {
    Operator op = annihilation(trunc);
    op.m = op.m.adjoint().eval();
    return op;
}

Operator field_identity(const TruncationSpec& trunc) {
    trunc.validate();
    return Operator{Matrix::Identity(trunc.n_max, trunc.n_max), Space::field};
}

Operator number_operator(const TruncationSpec& trunc) {
    trunc.validate();
    Operator op;
    op.m = Matrix::Zero(trunc.n_max, trunc.n_max);
    for (int n = 0; n < trunc.n_max; ++n) op.m(n, n) = double(n);
    op.tag = Space::field;
    return op;
}

Operator tensor(const Operator& left, const Operator& right) {
    if (left.tag != Space::qubit || right.tag != Space::field)
        throw DimensionError("tensor: expected qubit (x) field ordering");
    const long dl = left.dim(), dr = right.dim();
    if (dl * dr > (1L << 20))
        throw DimensionError("tensor: composite dimension overflow");
    Operator out;
    out.m = Matrix::Zero(dl * dr, dl * dr);
    for (long i = 0; i < dl; ++i)
        for (long j = 0; j < dl; ++j)
            out.m.block(i * dr, j * dr, dr, dr) = left.m(i, j) * right.m;
    out.tag = Space::composite;
    return out;
}

Vector vectorize(const Matrix& rho) {
    if (rho.rows() != rho.cols()) throw DimensionError("vectorize: matrix not square");
    return Eigen::Map<const Vector>(rho.data(), rho.size());
}

Matrix devectorize(const Vector& v) {
    const auto n = static_cast<long>(std::llround(std::sqrt(double(v.size()))));
    if (n * n != v.size()) throw DimensionError("devectorize: length is not a perfect square");
    return Eigen::Map<const Matrix>(v.data(), n, n);
}

} // namespace dsl
