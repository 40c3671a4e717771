#pragma once

#include "spde/functional.hpp"
#include "spde/nonlinearity.hpp"
#include "spde/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

/// Desk-scale probe of the Poisson equation of the Galerkin generator
///
///   L psi(x) = < A x + P_M F(x), D psi(x) > + 1/2 Tr D^2 psi(x),   x in H_M,
///
/// through the representation Psi(x) = int_0^inf E[ phi(X(t,x)) - phibar ] dt and the
/// Bismut-Elworthy-Li gradient formula. Points of H_M are coefficient vectors of
/// length M+1.
namespace spde {

using Point = std::vector<double>;

struct GalerkinSystem {
    std::size_t M = 0;
    std::optional<Nonlinearity> nonlinearity;
    TestFunctional phi = TestFunctional::cos_mode(0);
    double phibar = 0.0;

    static constexpr std::size_t kMaxModes = 4;

    /// Validates M + 1 <= kMaxModes. phibar is left at 0; set it with estimate_phibar.
    static GalerkinSystem make(std::size_t M, std::optional<Nonlinearity> nl, TestFunctional phi);

    [[nodiscard]] std::size_t dimension() const noexcept { return M + 1; }
    [[nodiscard]] bool is_linear() const noexcept { return !nonlinearity.has_value(); }
    [[nodiscard]] double lambda(std::size_t k) const noexcept;
    /// A x + P_M F(x).
    [[nodiscard]] Point drift(std::span<const double> x) const;
};

struct PhibarBudget {
    double tau = 1e-3;
    std::size_t steps = 200000;
    std::size_t burn_in = 20000;
    std::size_t replicas = 4;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

struct PhibarEstimate {
    double value = 0.0;
    double halfwidth = 0.0;  // 0 for closed-form values
    bool exact = false;
};

/// Linear systems with cos, exp(-s|.|^2), |.|^2 or constant functionals use the exact
/// Gaussian law of the Galerkin OU process; everything else runs a long ergodic
/// semi-implicit Euler average.
[[nodiscard]] PhibarEstimate estimate_phibar(const GalerkinSystem& sys, const PhibarBudget& budget = {});

struct PoissonOptions {
    double dt = 0.01;            // quadrature / sampling grid on [0, T_max]
    std::size_t substeps = 10;   // Euler substeps per grid interval (nonlinear systems)
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool check_tail = true;      // also integrate to 2 T_max and compare
};

struct PoissonEstimate {
    Point x;
    double value = 0.0;
    double mc_halfwidth = 0.0;
    double t_max = 0.0;
    std::size_t replicas = 0;
    /// Estimate of int_{T_max}^{2 T_max} (E phi - phibar) dt and its standard error.
    double tail_shift = 0.0;
    double tail_stderr = 0.0;
};

/// Psi at several points from one set of replica paths (common random numbers).
/// Throws TailNotConverged when the doubled horizon moves a value by more than the
/// combined 95% halfwidths of the value and of the shift.
[[nodiscard]] std::vector<PoissonEstimate> poisson_solution_estimates(const GalerkinSystem& sys,
                                                                      std::span<const Point> points,
                                                                      double t_max, std::size_t replicas,
                                                                      const PoissonOptions& opts = {});

[[nodiscard]] PoissonEstimate poisson_solution_estimate(const GalerkinSystem& sys, const Point& x,
                                                        double t_max, std::size_t replicas,
                                                        const PoissonOptions& opts = {});

/// L psi(x) with central differences of step delta for D psi and the diagonal of D^2 psi.
[[nodiscard]] double generator_apply_fd(const GalerkinSystem& sys,
                                        const std::function<double(std::span<const double>)>& psi,
                                        const Point& x, double delta);

/// Stencil of generator_apply_fd: x, then x + delta e_i and x - delta e_i for each i.
[[nodiscard]] std::vector<Point> fd_stencil(const Point& x, double delta);

struct PoissonResidual {
    Point x;
    double psi = 0.0;        // Psi-hat(x)
    double generator = 0.0;  // L Psi-hat(x)
    double target = 0.0;     // phi(x) - phibar
    double residual = 0.0;   // |L Psi-hat(x) + phi(x) - phibar|
};

/// Residual of the Poisson equation at x, with Psi-hat evaluated on the whole FD
/// stencil from one set of paths. Psi-hat = int (E phi - phibar) satisfies
/// L Psi = phibar - phi, which is the identity measured here.
[[nodiscard]] PoissonResidual poisson_residual(const GalerkinSystem& sys, const Point& x, double delta,
                                               double t_max, std::size_t replicas,
                                               const PoissonOptions& opts = {});

struct BelOptions {
    double dt = 1e-3;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

struct BelGradient {
    Point gradient;
    Point standard_error;
};

/// Bismut-Elworthy-Li estimate of D u(t,x), u(t,x) = E phi(X(t,x)):
///   D u(t,x).h = (1/t) E[ int_0^t <eta^h(s), dW(s)> phi(X(t,x)) ],
/// with the state and the first variation eta advanced by the same semi-implicit step.
[[nodiscard]] BelGradient bel_gradient(const GalerkinSystem& sys, double t, const Point& x,
                                       std::size_t replicas, const BelOptions& opts = {});

struct VariationalPath {
    Point state;  // X at the final time
    Point eta;    // first variation in direction h at the final time
};

/// State and first variation along one noise path of `steps` semi-implicit steps of size tau.
[[nodiscard]] VariationalPath variational_flow(const GalerkinSystem& sys, const Point& x, const Point& h,
                                               double tau, std::size_t steps, const NoiseSource& src);

/// CSV header M,phi,x,psi_hat,residual,T_max,replicas,seed and rows.
[[nodiscard]] std::string probe_csv_header();
[[nodiscard]] std::string probe_csv_row(const GalerkinSystem& sys, const PoissonResidual& r, double t_max,
                                        std::size_t replicas, std::uint64_t seed);

}  // namespace spde
