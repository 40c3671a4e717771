#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace spde {

/// Tridiagonal matrix stored by diagonals. sub[i] = A(i+1, i), super[i] = A(i, i+1).
struct TridiagonalMatrix {
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> super;

    TridiagonalMatrix() = default;
    explicit TridiagonalMatrix(std::size_t n) : sub(n ? n - 1 : 0), diag(n), super(n ? n - 1 : 0) {}

    [[nodiscard]] std::size_t size() const noexcept { return diag.size(); }
    [[nodiscard]] bool is_symmetric() const noexcept { return sub == super; }

    /// y = A x.
    void multiply(std::span<const double> x, std::span<double> y) const;
    [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const;

    /// a A + b B, entrywise on the three diagonals.
    [[nodiscard]] static TridiagonalMatrix combine(double a, const TridiagonalMatrix& A, double b,
                                                   const TridiagonalMatrix& B);

    [[nodiscard]] Eigen::MatrixXd to_dense() const;
};

/// Solve A x = rhs by the Thomas algorithm. Throws SolverBreakdown when a pivot
/// vanishes (relative to the diagonal scale).
void thomas_solve(const TridiagonalMatrix& A, std::span<const double> rhs, std::span<double> x);
[[nodiscard]] std::vector<double> thomas_solve(const TridiagonalMatrix& A, std::span<const double> rhs);

/// Lower bidiagonal Cholesky factor L of a symmetric tridiagonal matrix, A = L L^T.
struct BidiagonalFactor {
    std::vector<double> diag;  // L(i, i)
    std::vector<double> sub;   // L(i+1, i)

    [[nodiscard]] std::size_t size() const noexcept { return diag.size(); }

    /// y = L x.
    void multiply(std::span<const double> x, std::span<double> y) const;
    /// Solve L y = b in place.
    void forward_solve(std::span<double> b) const;
    /// Solve L^T y = b in place.
    void backward_solve(std::span<double> b) const;
};

/// Throws CholeskyFailure if A is not (numerically) positive definite.
[[nodiscard]] BidiagonalFactor cholesky(const TridiagonalMatrix& A);

}  // namespace spde
