#include "spde/gaussian_oracle.hpp"

#include "spde/csv.hpp"
#include "spde/error.hpp"

#include <cmath>

namespace spde {

namespace {

// For positive decreasing f, int_a^inf f <= sum_{s>=a} f(s) <= f(a) + int_a^inf f; the
// midpoint of the two bounds is off by at most f(a)/2.
SeriesValue close_tail(double partial, double integral_from_a, double f_at_a)
{
    return {partial + integral_from_a + 0.5 * f_at_a, 0.5 * f_at_a};
}

double check_tau(double tau)
{
    if (!(tau >= 0.0) || !std::isfinite(tau)) {
        throw InvalidInput("tau must be a nonnegative finite number");
    }
    return tau;
}

// Coordinates of a direction in the FEM eigenbasis: d_j = v_j^T w with w the load of v.
double fem_char_from_load(const LinearInvariantLaw& law, std::span<const double> w)
{
    const auto& pairs = law.op->eigenpairs();
    double q = 0.0;
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        double d = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            d += pairs[j].vector[i] * w[i];
        }
        q += d * d * mode_variance(law, j);
    }
    return std::exp(-0.5 * q);
}

}  // namespace

LinearInvariantLaw LinearInvariantLaw::continuous()
{
    return {Kind::Continuous, 0.0, nullptr};
}

LinearInvariantLaw LinearInvariantLaw::discrete_time_spectral(double tau)
{
    return {Kind::DiscreteTimeSpectral, check_tau(tau), nullptr};
}

LinearInvariantLaw LinearInvariantLaw::fem_continuous_time(std::shared_ptr<const FemOperator> op)
{
    if (!op) {
        throw InvalidInput("FEM law needs an operator");
    }
    return {Kind::FemContinuousTime, 0.0, std::move(op)};
}

LinearInvariantLaw LinearInvariantLaw::fem_fully_discrete(std::shared_ptr<const FemOperator> op, double tau)
{
    if (!op) {
        throw InvalidInput("FEM law needs an operator");
    }
    return {Kind::FemFullyDiscrete, check_tau(tau), std::move(op)};
}

bool LinearInvariantLaw::is_fem() const noexcept
{
    return kind == Kind::FemContinuousTime || kind == Kind::FemFullyDiscrete;
}

std::string LinearInvariantLaw::name() const
{
    switch (kind) {
    case Kind::Continuous:
        return "continuous";
    case Kind::DiscreteTimeSpectral:
        return "discrete_time_spectral";
    case Kind::FemContinuousTime:
        return "fem_continuous_time";
    case Kind::FemFullyDiscrete:
        return "fem_fully_discrete";
    }
    return "unknown";
}

double mode_variance(const LinearInvariantLaw& law, std::size_t j)
{
    double lambda = 0.0;
    if (law.is_fem()) {
        const auto lambdas = law.op->eigenvalues();
        if (j >= lambdas.size()) {
            throw InvalidInput("mode_variance: mode index beyond the FEM space dimension");
        }
        lambda = lambdas[j];
    } else {
        lambda = eigenvalue(j);
    }
    const bool discrete = law.kind == LinearInvariantLaw::Kind::DiscreteTimeSpectral ||
                          law.kind == LinearInvariantLaw::Kind::FemFullyDiscrete;
    return discrete ? 1.0 / (2.0 * lambda + lambda * lambda * law.tau) : 1.0 / (2.0 * lambda);
}

double char_functional(const LinearInvariantLaw& law, const SpectralField& v)
{
    if (!law.is_fem()) {
        double q = 0.0;
        for (std::size_t k = 0; k < v.mode_count(); ++k) {
            q += v[k] * v[k] * mode_variance(law, k);
        }
        return std::exp(-0.5 * q);
    }
    std::vector<double> w(law.op->size(), 0.0);
    for (std::size_t k = 0; k < v.mode_count(); ++k) {
        if (v[k] == 0.0) {
            continue;
        }
        const auto b = sine_load(law.op->mesh(), k);
        for (std::size_t i = 0; i < w.size(); ++i) {
            w[i] += v[k] * b[i];
        }
    }
    return fem_char_from_load(law, w);
}

double char_functional(const LinearInvariantLaw& law, const NodalField& v)
{
    if (law.is_fem()) {
        if (!(v.mesh() == law.op->mesh())) {
            throw InvalidInput("char_functional: nodal direction lives on a different mesh");
        }
        return fem_char_from_load(law, law.op->mass().multiply(v.values()));
    }
    // Spectral coordinates <v_h, e_k> decay like k^-2; 16 modes per node is far past
    // the point where var_k d_k^2 stops mattering.
    const std::size_t modes = 16 * (v.size() + 1);
    double q = 0.0;
    for (std::size_t k = 0; k < modes; ++k) {
        const auto b = sine_load(v.mesh(), k);
        double d = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i) {
            d += b[i] * v[i];
        }
        q += d * d * mode_variance(law, k);
    }
    return std::exp(-0.5 * q);
}

SeriesValue second_moment_certified(const LinearInvariantLaw& law, std::size_t truncation, TailMode tail)
{
    if (law.is_fem()) {
        double s = 0.0;
        const std::size_t n = law.op->size();
        for (std::size_t j = 0; j < n; ++j) {
            s += mode_variance(law, j);
        }
        return {s, 0.0};
    }
    double partial = 0.0;
    // Smallest terms first.
    for (std::size_t k = truncation; k-- > 0;) {
        partial += mode_variance(law, k);
    }
    if (tail == TailMode::None) {
        return {partial, 0.0};
    }
    const double a = static_cast<double>(truncation + 1);  // s = k + 1 of the first omitted mode
    const double pi2 = kPi * kPi;
    if (law.kind == LinearInvariantLaw::Kind::Continuous || law.tau == 0.0) {
        return close_tail(partial, 1.0 / (2.0 * pi2 * a), 1.0 / (2.0 * pi2 * a * a));
    }
    // 1/(2 lambda + lambda^2 tau) = (1/2) [ 1/(pi^2 s^2) - tau/(2 + pi^2 tau s^2) ].
    const double tau = law.tau;
    const double c = kPi * std::sqrt(0.5 * tau);
    const double integral = 0.5 * (1.0 / (pi2 * a) - tau / (2.0 * c) * std::atan(1.0 / (c * a)));
    const double lambda_a = pi2 * a * a;
    return close_tail(partial, integral, 1.0 / (2.0 * lambda_a + lambda_a * lambda_a * tau));
}

double second_moment(const LinearInvariantLaw& law, std::size_t truncation, TailMode tail)
{
    return second_moment_certified(law, truncation, tail).value;
}

SeriesValue tau_weak_error_certified(double tau, std::size_t truncation, TailMode tail)
{
    check_tau(tau);
    if (tau == 0.0) {
        return {0.0, 0.0};
    }
    double partial = 0.0;
    for (std::size_t k = truncation; k-- > 0;) {
        partial += tau / (2.0 * (2.0 + eigenvalue(k) * tau));
    }
    if (tail == TailMode::None) {
        return {partial, 0.0};
    }
    const double a = static_cast<double>(truncation + 1);
    const double c = kPi * std::sqrt(0.5 * tau);
    const double integral = tau * std::atan(1.0 / (c * a)) / (4.0 * c);
    return close_tail(partial, integral, tau / (2.0 * (2.0 + kPi * kPi * a * a * tau)));
}

double tau_weak_error_exact(double tau, std::size_t truncation, TailMode tail)
{
    return tau_weak_error_certified(tau, truncation, tail).value;
}

double h_weak_error_exact(const FemOperator& op)
{
    double s = 0.0;
    const auto lambdas = op.eigenvalues();
    for (std::size_t j = lambdas.size(); j-- > 0;) {
        s += 0.5 / lambdas[j];
    }
    return std::abs(kContinuousSecondMoment - s);
}

std::string oracle_csv(const std::vector<OracleRow>& rows)
{
    std::string out = "variant,parameter,value,certified_error\n";
    for (const auto& r : rows) {
        out += csv::join({r.variant, csv::format(r.parameter), csv::format(r.value),
                          csv::format(r.certified_error)});
        out += '\n';
    }
    return out;
}

}  // namespace spde
