#include "spde/spectral.hpp"

#include "spde/error.hpp"

#include <cmath>
#include <numeric>

namespace spde {

double eigenvalue(std::size_t k) noexcept
{
    const double m = static_cast<double>(k + 1);
    return kPi * kPi * m * m;
}

double eigenfunction(std::size_t k, double xi) noexcept
{
    return std::sqrt(2.0) * std::sin(static_cast<double>(k + 1) * kPi * xi);
}

EigenPair eigen_pair(std::size_t k) noexcept
{
    return EigenPair{k, eigenvalue(k)};
}

SpectralField::SpectralField(std::size_t mode_count) : coeffs_(mode_count, 0.0) {}

SpectralField::SpectralField(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

SpectralField SpectralField::unit(std::size_t mode_count, std::size_t mode)
{
    if (mode >= mode_count) {
        throw InvalidInput("SpectralField::unit: mode out of range");
    }
    SpectralField x(mode_count);
    x[mode] = 1.0;
    return x;
}

bool SpectralField::is_finite() const noexcept
{
    for (double c : coeffs_) {
        if (!std::isfinite(c)) {
            return false;
        }
    }
    return true;
}

double SpectralField::norm() const noexcept
{
    return std::sqrt(std::inner_product(coeffs_.begin(), coeffs_.end(), coeffs_.begin(), 0.0));
}

double SpectralField::sobolev_norm(double alpha) const noexcept
{
    double s = 0.0;
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
        const double c = std::pow(eigenvalue(k), alpha) * coeffs_[k];
        s += c * c;
    }
    return std::sqrt(s);
}

double SpectralField::evaluate_at(double xi) const noexcept
{
    double s = 0.0;
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
        s += coeffs_[k] * eigenfunction(k, xi);
    }
    return s;
}

double inner(const SpectralField& a, const SpectralField& b) noexcept
{
    const std::size_t n = std::min(a.mode_count(), b.mode_count());
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        s += a[k] * b[k];
    }
    return s;
}

SpectralField frac_power_apply(double alpha, const SpectralField& x)
{
    SpectralField y = x;
    if (alpha == 0.0) {
        return y;
    }
    for (std::size_t k = 0; k < y.mode_count(); ++k) {
        y[k] *= std::pow(eigenvalue(k), alpha);
    }
    return y;
}

SpectralField semigroup_apply(double t, const SpectralField& x)
{
    if (!(t >= 0.0)) {
        throw InvalidInput("semigroup_apply: t must be nonnegative");
    }
    SpectralField y = x;
    if (t == 0.0) {
        return y;
    }
    for (std::size_t k = 0; k < y.mode_count(); ++k) {
        y[k] *= std::exp(-eigenvalue(k) * t);
    }
    return y;
}

SpectralField project_modes(std::size_t M, const SpectralField& x)
{
    SpectralField y = x;
    for (std::size_t k = M + 1; k < y.mode_count(); ++k) {
        y[k] = 0.0;
    }
    return y;
}

}  // namespace spde
