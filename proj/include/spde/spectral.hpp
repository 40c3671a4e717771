#pragma once

#include <cstddef>
#include <span>
#include <vector>

/// Diagonal calculus of the Dirichlet Laplacian on (0,1).
///
/// Eigenpairs of -A are lambda_k = pi^2 (k+1)^2 and e_k(xi) = sqrt(2) sin((k+1) pi xi),
/// k = 0, 1, ...  Everything here acts coefficient-wise in that basis.
namespace spde {

inline constexpr double kPi = 3.14159265358979323846;

/// Eigenvalue of -A for mode k, computed from the closed form.
[[nodiscard]] double eigenvalue(std::size_t k) noexcept;

/// Eigenfunction e_k evaluated at xi.
[[nodiscard]] double eigenfunction(std::size_t k, double xi) noexcept;

struct EigenPair {
    std::size_t index = 0;
    double lambda = 0.0;

    [[nodiscard]] double evaluate_at(double xi) const noexcept { return eigenfunction(index, xi); }
};

[[nodiscard]] EigenPair eigen_pair(std::size_t k) noexcept;

/// Coefficients of an element of H_M in the sine eigenbasis.
class SpectralField {
public:
    SpectralField() = default;
    explicit SpectralField(std::size_t mode_count);
    explicit SpectralField(std::vector<double> coeffs);

    /// Field with a single unit coefficient on `mode`.
    static SpectralField unit(std::size_t mode_count, std::size_t mode);

    [[nodiscard]] std::size_t mode_count() const noexcept { return coeffs_.size(); }
    [[nodiscard]] std::span<const double> coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] std::span<double> coeffs() noexcept { return coeffs_; }
    double operator[](std::size_t k) const noexcept { return coeffs_[k]; }
    double& operator[](std::size_t k) noexcept { return coeffs_[k]; }

    [[nodiscard]] bool is_finite() const noexcept;

    /// |x|_H, by Parseval.
    [[nodiscard]] double norm() const noexcept;

    /// |(-A)^alpha x|_H.
    [[nodiscard]] double sobolev_norm(double alpha) const noexcept;

    /// Point value sum_k x_k e_k(xi).
    [[nodiscard]] double evaluate_at(double xi) const noexcept;

    friend bool operator==(const SpectralField&, const SpectralField&) = default;

private:
    std::vector<double> coeffs_;
};

[[nodiscard]] double inner(const SpectralField& a, const SpectralField& b) noexcept;

/// (-A)^alpha x, coefficient k multiplied by lambda_k^alpha.
[[nodiscard]] SpectralField frac_power_apply(double alpha, const SpectralField& x);

/// e^{tA} x, coefficient k multiplied by exp(-lambda_k t). Requires t >= 0.
[[nodiscard]] SpectralField semigroup_apply(double t, const SpectralField& x);

/// P_M x: keeps modes 0..M, zeroes the rest. The mode count is preserved.
[[nodiscard]] SpectralField project_modes(std::size_t M, const SpectralField& x);

}  // namespace spde
