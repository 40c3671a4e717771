#pragma once

#include "spde/fem.hpp"
#include "spde/functional.hpp"
#include "spde/nonlinearity.hpp"
#include "spde/rng.hpp"
#include "spde/spectral.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

/// Semi-implicit Euler integrators for dX = AX dt + F(X) dt + dW,
///
///   X_{k+1} = S (X_k + tau F(X_k) + sqrt(tau) chi_{k+1}),   S = (I - tau A_h)^{-1},
///
/// on the spectral Galerkin space H_M and on P1 finite elements.
namespace spde {

/// Spectral Galerkin truncation keeping modes 0..M.
struct SpectralVariant {
    std::size_t M = 0;
};

struct FemVariant {
    std::shared_ptr<const FemOperator> op;
};

using Discretization = std::variant<SpectralVariant, FemVariant>;

[[nodiscard]] FemVariant fem_variant(const Mesh& mesh);

struct SchemeConfig {
    Discretization variant = SpectralVariant{};
    double tau = 0.0;
    std::size_t steps = 0;
    std::size_t burn_in = 0;
    std::optional<Nonlinearity> nonlinearity;
    /// Initial condition x as eigen-coefficients; empty means x = 0.
    SpectralField initial;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    TestFunctional functional = TestFunctional::cos_mode(0);
    double tau0 = 1.0;

    /// Throws InvalidInput on violated invariants (tau in (0, tau0], burn_in < steps).
    void validate() const;

    [[nodiscard]] bool is_spectral() const noexcept { return std::holds_alternative<SpectralVariant>(variant); }
    [[nodiscard]] std::string variant_name() const;
    /// M for spectral, h for FEM.
    [[nodiscard]] double resolution() const;
};

/// Burn-in used when none is configured: 10% of the horizon.
[[nodiscard]] constexpr std::size_t default_burn_in(std::size_t steps) noexcept { return steps / 10; }

/// M+1 independent standard normals for one step. The sqrt(tau) factor is applied in the step.
[[nodiscard]] SpectralField sample_noise_spectral(std::size_t M, double tau, NoiseSource& src);

/// z = sqrt(tau) L xi ~ N(0, tau M_h), the load of the projected Wiener increment.
[[nodiscard]] std::vector<double> sample_noise_fem(const FemOperator& op, double tau, NoiseSource& src);

/// b_j = int g(xi, x_h(xi)) phi_j(xi), composite 2-point Gauss per element.
[[nodiscard]] std::vector<double> nemytskii_load_fem(const FemOperator& op, const Nonlinearity& nl,
                                                     const NodalField& x);

/// Pseudo-spectral P_M F(x) on the grid xi_q = q/(Q+1), Q = 2(M+1).
[[nodiscard]] SpectralField nemytskii_project_spectral(std::size_t M, const Nonlinearity& nl,
                                                       const SpectralField& x);

/// Precomputed one-step map for the spectral Galerkin scheme.
class SpectralScheme {
public:
    SpectralScheme(std::size_t M, double tau, std::optional<Nonlinearity> nl);

    [[nodiscard]] std::size_t dimension() const noexcept { return lambda_.size(); }
    [[nodiscard]] std::size_t grid_size() const noexcept { return static_cast<std::size_t>(synth_.rows()); }
    [[nodiscard]] double tau() const noexcept { return tau_; }
    [[nodiscard]] std::span<const double> lambdas() const noexcept { return lambda_; }
    [[nodiscard]] const std::optional<Nonlinearity>& nonlinearity() const noexcept { return nl_; }

    struct Workspace {
        Eigen::VectorXd grid;
        Eigen::VectorXd drift;
    };
    [[nodiscard]] Workspace make_workspace() const;

    /// out = P_M F(x) by synthesis on the collocation grid and trapezoidal analysis with
    /// the first Euler-Maclaurin endpoint correction.
    void nemytskii(std::span<const double> x, std::span<double> out, Workspace& ws) const;

    /// Jacobian P_M DF(x) P_M restricted to H_M, (M+1)x(M+1).
    [[nodiscard]] Eigen::MatrixXd nemytskii_jacobian(std::span<const double> x, Workspace& ws) const;

    /// In-place step with the given standard normals (length dimension()).
    void step(std::span<double> x, std::span<const double> normals, Workspace& ws) const;

private:
    double tau_;
    std::optional<Nonlinearity> nl_;
    std::vector<double> lambda_;
    std::vector<double> resolvent_;  // 1/(1 + tau lambda_k)
    Eigen::MatrixXd synth_;          // synth_(q, k) = e_k(xi_q)
    std::vector<double> grid_xi_;
    std::vector<double> endpoint_weight_left_;   // correction factor multiplying g(0, 0)
    std::vector<double> endpoint_weight_right_;  // correction factor multiplying g(1, 0)
};

/// Precomputed one-step map for the P1 finite element scheme.
class FemScheme {
public:
    FemScheme(std::shared_ptr<const FemOperator> op, double tau, std::optional<Nonlinearity> nl);

    [[nodiscard]] std::size_t dimension() const noexcept { return op_->size(); }
    [[nodiscard]] const FemOperator& op() const noexcept { return *op_; }
    [[nodiscard]] double tau() const noexcept { return tau_; }

    struct Workspace {
        std::vector<double> rhs;
        std::vector<double> noise;
        std::vector<double> load;
    };
    [[nodiscard]] Workspace make_workspace() const;

    void nemytskii_load(std::span<const double> x, std::span<double> out) const;

    /// (M + tau K) x' = M x + tau b(x) + sqrt(tau) L normals, in place.
    void step(std::span<double> x, std::span<const double> normals, Workspace& ws) const;

private:
    std::shared_ptr<const FemOperator> op_;
    double tau_;
    std::optional<Nonlinearity> nl_;
    BidiagonalFactor system_;  // Cholesky factor of M + tau K
};

using SchemeState = std::variant<SpectralField, NodalField>;

/// One discretization with its precomputed step and a bound test functional.
class Scheme {
public:
    explicit Scheme(const SchemeConfig& cfg);

    [[nodiscard]] std::size_t dimension() const noexcept;
    [[nodiscard]] double tau() const noexcept { return tau_; }

    /// P_M x or P_h x for the configured initial condition.
    [[nodiscard]] std::vector<double> initial_state(const SpectralField& x) const;

    using Workspace = std::variant<SpectralScheme::Workspace, FemScheme::Workspace>;
    [[nodiscard]] Workspace make_workspace() const;

    void step(std::span<double> x, std::span<const double> normals, Workspace& ws) const;

    /// |x|_H^2.
    [[nodiscard]] double norm_squared(std::span<const double> x) const;

    /// Coefficient vector c with <x, v> = c . x for this discretization's coordinates.
    [[nodiscard]] std::vector<double> inner_weights(const SpectralField& v) const;
    [[nodiscard]] std::vector<double> inner_weights(const NodalField& v) const;

    /// phi as a function of raw state coordinates.
    [[nodiscard]] std::function<double(std::span<const double>)> bind(const TestFunctional& phi) const;

    [[nodiscard]] SchemeState wrap(std::vector<double> x) const;

    [[nodiscard]] const SpectralScheme* spectral() const noexcept { return std::get_if<SpectralScheme>(&impl_); }
    [[nodiscard]] const FemScheme* fem() const noexcept { return std::get_if<FemScheme>(&impl_); }

private:
    double tau_;
    std::variant<SpectralScheme, FemScheme> impl_;
};

/// X_{k+1} from X_k for the spectral Galerkin scheme, drawing the step's noise from src.
[[nodiscard]] SpectralField step_spectral(const SpectralField& state, const SchemeConfig& cfg,
                                          NoiseSource& src);

[[nodiscard]] NodalField step_fem(const NodalField& state, const SchemeConfig& cfg, NoiseSource& src);

/// observer(m, X_m) for m = 0..N-1; the final state X_N is returned.
using Observer = std::function<void(std::size_t, std::span<const double>)>;

[[nodiscard]] SchemeState simulate(const SchemeConfig& cfg, const Observer& observer = {});

/// Same as simulate, reusing an already constructed scheme.
[[nodiscard]] std::vector<double> simulate_raw(const Scheme& scheme, const SchemeConfig& cfg,
                                               const Observer& observer = {});

/// |X_m - Y_m|_H for m = 0..steps, X and Y started from x and y and driven by the same
/// noise (synchronous coupling).
[[nodiscard]] std::vector<double> synchronous_coupling_gaps(const SchemeConfig& cfg, const SpectralField& x,
                                                            const SpectralField& y);

}  // namespace spde
