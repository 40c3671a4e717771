#include "spde/tridiagonal.hpp"

#include "spde/error.hpp"

#include <cmath>
#include <limits>

namespace spde {

void TridiagonalMatrix::multiply(std::span<const double> x, std::span<double> y) const
{
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        double s = diag[i] * x[i];
        if (i > 0) {
            s += sub[i - 1] * x[i - 1];
        }
        if (i + 1 < n) {
            s += super[i] * x[i + 1];
        }
        y[i] = s;
    }
}

std::vector<double> TridiagonalMatrix::multiply(std::span<const double> x) const
{
    std::vector<double> y(size());
    multiply(x, y);
    return y;
}

TridiagonalMatrix TridiagonalMatrix::combine(double a, const TridiagonalMatrix& A, double b,
                                             const TridiagonalMatrix& B)
{
    TridiagonalMatrix C(A.size());
    for (std::size_t i = 0; i < A.size(); ++i) {
        C.diag[i] = a * A.diag[i] + b * B.diag[i];
    }
    for (std::size_t i = 0; i + 1 < A.size(); ++i) {
        C.sub[i] = a * A.sub[i] + b * B.sub[i];
        C.super[i] = a * A.super[i] + b * B.super[i];
    }
    return C;
}

Eigen::MatrixXd TridiagonalMatrix::to_dense() const
{
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        D(i, i) = diag[static_cast<std::size_t>(i)];
        if (i + 1 < n) {
            D(i + 1, i) = sub[static_cast<std::size_t>(i)];
            D(i, i + 1) = super[static_cast<std::size_t>(i)];
        }
    }
    return D;
}

void thomas_solve(const TridiagonalMatrix& A, std::span<const double> rhs, std::span<double> x)
{
    const std::size_t n = A.size();
    std::vector<double> c(n);
    double scale = 0.0;
    for (double d : A.diag) {
        scale = std::max(scale, std::abs(d));
    }
    const double tiny = scale * std::numeric_limits<double>::epsilon();

    double pivot = A.diag[0];
    if (!(std::abs(pivot) > tiny)) {
        throw SolverBreakdown("thomas_solve: vanishing pivot at row 0");
    }
    x[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        c[i - 1] = A.super[i - 1] / pivot;
        pivot = A.diag[i] - A.sub[i - 1] * c[i - 1];
        if (!(std::abs(pivot) > tiny)) {
            throw SolverBreakdown("thomas_solve: vanishing pivot at row " + std::to_string(i));
        }
        x[i] = (rhs[i] - A.sub[i - 1] * x[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] -= c[i] * x[i + 1];
    }
}

std::vector<double> thomas_solve(const TridiagonalMatrix& A, std::span<const double> rhs)
{
    std::vector<double> x(A.size());
    thomas_solve(A, rhs, x);
    return x;
}

void BidiagonalFactor::multiply(std::span<const double> x, std::span<double> y) const
{
    const std::size_t n = size();
    for (std::size_t i = n; i-- > 0;) {
        y[i] = diag[i] * x[i] + (i > 0 ? sub[i - 1] * x[i - 1] : 0.0);
    }
}

void BidiagonalFactor::forward_solve(std::span<double> b) const
{
    b[0] /= diag[0];
    for (std::size_t i = 1; i < size(); ++i) {
        b[i] = (b[i] - sub[i - 1] * b[i - 1]) / diag[i];
    }
}

void BidiagonalFactor::backward_solve(std::span<double> b) const
{
    const std::size_t n = size();
    b[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        b[i] = (b[i] - sub[i] * b[i + 1]) / diag[i];
    }
}

BidiagonalFactor cholesky(const TridiagonalMatrix& A)
{
    if (!A.is_symmetric()) {
        throw CholeskyFailure("cholesky: matrix is not symmetric");
    }
    const std::size_t n = A.size();
    BidiagonalFactor L;
    L.diag.resize(n);
    L.sub.resize(n ? n - 1 : 0);
    double d = A.diag[0];
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            L.sub[i - 1] = A.sub[i - 1] / L.diag[i - 1];
            d = A.diag[i] - L.sub[i - 1] * L.sub[i - 1];
        }
        if (!(d > 0.0)) {
            throw CholeskyFailure("cholesky: nonpositive pivot at row " + std::to_string(i));
        }
        L.diag[i] = std::sqrt(d);
    }
    return L;
}

}  // namespace spde
