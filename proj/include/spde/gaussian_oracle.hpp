#pragma once

#include "spde/fem.hpp"
#include "spde/spectral.hpp"

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

/// Exact invariant laws of the linear equation (F = 0).
///
/// Every mode of the linear dynamics is an independent Ornstein-Uhlenbeck process
/// (continuous time) or AR(1) chain (semi-implicit Euler), so the invariant laws are
/// centred Gaussians, diagonal in the eigenbasis, with per-mode variances
///
///   continuous time:   1 / (2 lambda)
///   time step tau:     1 / (2 lambda + lambda^2 tau)
///
/// where lambda runs over lambda_k = pi^2 (k+1)^2 for the spectral laws and over the
/// generalized eigenvalues lambda_j^h of (K_h, M_h) for the finite element laws.
namespace spde {

struct LinearInvariantLaw {
    enum class Kind { Continuous, DiscreteTimeSpectral, FemContinuousTime, FemFullyDiscrete };

    Kind kind = Kind::Continuous;
    double tau = 0.0;
    std::shared_ptr<const FemOperator> op;

    static LinearInvariantLaw continuous();
    static LinearInvariantLaw discrete_time_spectral(double tau);
    static LinearInvariantLaw fem_continuous_time(std::shared_ptr<const FemOperator> op);
    static LinearInvariantLaw fem_fully_discrete(std::shared_ptr<const FemOperator> op, double tau);

    [[nodiscard]] bool is_fem() const noexcept;
    [[nodiscard]] std::string name() const;
};

/// How infinite spectral series are closed.
enum class TailMode {
    Analytic,  // add the integral-comparison tail beyond the truncation
    None,      // plain partial sum of the first `truncation` modes
};

/// A series value with a rigorous bound on the tail approximation error.
struct SeriesValue {
    double value = 0.0;
    double certified_error = 0.0;
};

inline constexpr std::size_t kDefaultTruncation = 200000;

[[nodiscard]] double mode_variance(const LinearInvariantLaw& law, std::size_t j);

/// E cos<X, v> = exp(-1/2 sum_j d_j^2 var_j), d_j the coordinates of v in the law's
/// eigenbasis. Spectral directions are projected onto the FEM eigenbasis for FEM laws.
[[nodiscard]] double char_functional(const LinearInvariantLaw& law, const SpectralField& v);
[[nodiscard]] double char_functional(const LinearInvariantLaw& law, const NodalField& v);

/// E|X|_H^2. For spectral laws the first `truncation` modes are summed and the tail is
/// closed per `tail`; FEM laws always use the full trace over V_h.
[[nodiscard]] SeriesValue second_moment_certified(const LinearInvariantLaw& law,
                                                  std::size_t truncation = kDefaultTruncation,
                                                  TailMode tail = TailMode::Analytic);
[[nodiscard]] double second_moment(const LinearInvariantLaw& law, std::size_t truncation = kDefaultTruncation,
                                   TailMode tail = TailMode::Analytic);

/// Exact second-moment bias of the time-discrete spectral law:
/// E_mu|X|^2 - E_mu_tau|X|^2 = sum_k tau / (2 (2 + lambda_k tau)).
[[nodiscard]] SeriesValue tau_weak_error_certified(double tau, std::size_t truncation = kDefaultTruncation,
                                                   TailMode tail = TailMode::Analytic);
[[nodiscard]] double tau_weak_error_exact(double tau, std::size_t truncation = kDefaultTruncation,
                                          TailMode tail = TailMode::Analytic);

/// Second-moment bias of the FEM continuous-time law, |1/12 - (1/2) sum_j 1/lambda_j^h|.
[[nodiscard]] double h_weak_error_exact(const FemOperator& op);

/// E_mu|X|_H^2 of the continuous law, sum_k 1/(2 pi^2 (k+1)^2) = 1/12.
inline constexpr double kContinuousSecondMoment = 1.0 / 12.0;

struct OracleRow {
    std::string variant;
    double parameter = 0.0;
    double value = 0.0;
    double certified_error = 0.0;
};

/// CSV with header variant,parameter,value,certified_error.
[[nodiscard]] std::string oracle_csv(const std::vector<OracleRow>& rows);

}  // namespace spde
