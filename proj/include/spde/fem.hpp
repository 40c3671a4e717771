#pragma once

#include "spde/mesh.hpp"
#include "spde/tridiagonal.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

/// P1 finite elements on a partition of [0,1] with homogeneous Dirichlet conditions.
///
/// A function x_h in V_h is stored by its values at the interior nodes. The mass
/// matrix M_h = (<phi_i, phi_j>) and stiffness matrix K_h = (<phi_i', phi_j'>) are
/// tridiagonal; the discrete operator A_h satisfies -A_h = M_h^{-1} K_h in nodal
/// coordinates.
namespace spde {

using ScalarFunction = std::function<double(double)>;

class FemOperator;

/// Element of V_h as nodal values at the interior nodes.
class NodalField {
public:
    NodalField() = default;
    NodalField(std::shared_ptr<const Mesh> mesh, std::vector<double> values);

    [[nodiscard]] const Mesh& mesh() const noexcept { return *mesh_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::span<double> values() noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t j) const noexcept { return values_[j]; }

    /// Piecewise linear interpolation, zero at the boundary.
    [[nodiscard]] double evaluate_at(double xi) const noexcept;

private:
    std::shared_ptr<const Mesh> mesh_;
    std::vector<double> values_;
};

struct GeneralizedEigenpair {
    double lambda = 0.0;
    std::vector<double> vector;  // M_h-orthonormal nodal coordinates
};

/// Assembled mass and stiffness matrices plus lazily computed eigenpairs of -A_h.
/// Immutable after construction; copies share the eigenpair cache.
class FemOperator {
public:
    explicit FemOperator(Mesh mesh);

    [[nodiscard]] const Mesh& mesh() const noexcept { return *mesh_; }
    [[nodiscard]] std::shared_ptr<const Mesh> mesh_ptr() const noexcept { return mesh_; }
    [[nodiscard]] std::size_t size() const noexcept { return mass_.size(); }
    [[nodiscard]] const TridiagonalMatrix& mass() const noexcept { return mass_; }
    [[nodiscard]] const TridiagonalMatrix& stiffness() const noexcept { return stiffness_; }
    [[nodiscard]] const BidiagonalFactor& mass_cholesky() const noexcept { return mass_chol_; }

    /// All N_h generalized eigenpairs K v = lambda M v, ascending, computed on first use.
    [[nodiscard]] const std::vector<GeneralizedEigenpair>& eigenpairs() const;
    /// Eigenvalues only, ascending.
    [[nodiscard]] std::span<const double> eigenvalues() const;

    /// |x_h|_H^2 = x^T M_h x.
    [[nodiscard]] double norm_squared(std::span<const double> x) const;

    /// |(-A_h)^alpha x_h|_H through the eigendecomposition.
    [[nodiscard]] double discrete_sobolev_norm(double alpha, std::span<const double> x) const;

    /// Coordinates c_j = v_j^T M_h x of x_h in the eigenbasis of -A_h.
    [[nodiscard]] std::vector<double> eigen_coordinates(std::span<const double> x) const;

    [[nodiscard]] NodalField make_field(std::vector<double> values) const;

private:
    struct EigenCache;

    std::shared_ptr<const Mesh> mesh_;
    TridiagonalMatrix mass_;
    TridiagonalMatrix stiffness_;
    BidiagonalFactor mass_chol_;
    std::shared_ptr<EigenCache> cache_;
};

[[nodiscard]] FemOperator assemble(const Mesh& mesh);

/// Generalized eigenpairs of (K_h, M_h), ascending eigenvalues, M_h-orthonormal vectors.
[[nodiscard]] const std::vector<GeneralizedEigenpair>& generalized_eigs(const FemOperator& op);

/// L2 projection P_h f: solves M_h c = b, b_j = int f phi_j (2-point Gauss per element).
[[nodiscard]] NodalField l2_project(const FemOperator& op, const ScalarFunction& f);

/// Ritz projection R_h f: solves K_h c = b, b_j = int f' phi_j'. Requires f(0) = f(1) = 0.
[[nodiscard]] NodalField ritz_project(const FemOperator& op, const ScalarFunction& f);

/// sum_j (lambda_j^h)^{-1/2-kappa}, kappa in (0, 1/2).
[[nodiscard]] double trace_neg_half_power(const FemOperator& op, double kappa);

/// Count of (j, lambda) pairs, j = 1..j_max, lambda in `lambdas`, where the symbol of
/// (-A_h)^{1-kappa} S^j exceeds its smoothing bound:
///   lambda^{1-kappa} / (1 + lambda tau)^j > (j tau)^{-(1-kappa)} (1 + lambda0 tau)^{-j kappa}.
/// Evaluated in logarithms with a relative slack of 1e-12.
[[nodiscard]] std::size_t smoothing_violations(std::span<const double> lambdas, double kappa, double tau,
                                               std::size_t j_max, double lambda0);

/// Solve (M_h + tau K_h) x = rhs by the Thomas algorithm. tau = 0 solves M_h x = rhs.
[[nodiscard]] NodalField semi_implicit_solve(const FemOperator& op, double tau,
                                             std::span<const double> rhs);

/// Load vector b_j = int f phi_j by composite 2-point Gauss per element.
[[nodiscard]] std::vector<double> load_vector(const Mesh& mesh, const ScalarFunction& f);

/// Exact load vector of the eigenfunction e_k: b_j = int e_k phi_j.
[[nodiscard]] std::vector<double> sine_load(const Mesh& mesh, std::size_t k);

/// L2 distance between a nodal field and a function (5-point Gauss per element).
[[nodiscard]] double l2_distance(const NodalField& x, const ScalarFunction& f);

/// L2 distance between derivatives: | x_h' - df |, 5-point Gauss per element.
[[nodiscard]] double h1_seminorm_distance(const NodalField& x, const ScalarFunction& df);

}  // namespace spde
