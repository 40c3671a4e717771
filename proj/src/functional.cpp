#include "spde/functional.hpp"

#include "spde/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spde {

using Kind = TestFunctional::Kind;

TestFunctional TestFunctional::cos_inner(SpectralField direction)
{
    TestFunctional phi;
    phi.kind = Kind::CosInner;
    const double n = direction.norm();
    phi.direction = std::move(direction);
    phi.label = "cos_inner";
    phi.sup_norm = 1.0;
    phi.first_norm = n;
    phi.second_norm = n * n;
    return phi;
}

TestFunctional TestFunctional::cos_inner(NodalField direction)
{
    TestFunctional phi;
    phi.kind = Kind::CosInner;
    phi.direction = std::move(direction);
    phi.label = "cos_inner";
    phi.sup_norm = 1.0;
    return phi;
}

TestFunctional TestFunctional::cos_mode(std::size_t mode)
{
    auto phi = cos_inner(SpectralField::unit(mode + 1, mode));
    phi.label = "cos_e" + std::to_string(mode);
    return phi;
}

TestFunctional TestFunctional::exp_neg_sq(double scale)
{
    if (!(scale > 0.0)) {
        throw InvalidInput("exp_neg_sq: scale must be positive");
    }
    TestFunctional phi;
    phi.kind = Kind::ExpNegSq;
    phi.scale = scale;
    phi.label = "exp_neg_sq";
    phi.sup_norm = 1.0;
    phi.first_norm = std::sqrt(2.0 * scale / std::exp(1.0));
    phi.second_norm = 2.0 * scale;
    return phi;
}

TestFunctional TestFunctional::second_moment()
{
    TestFunctional phi;
    phi.kind = Kind::SecondMomentH;
    phi.label = "second_moment";
    return phi;
}

TestFunctional TestFunctional::custom_fn(std::string label,
                                         std::function<double(std::span<const double>)> f)
{
    TestFunctional phi;
    phi.kind = Kind::Custom;
    phi.custom = std::move(f);
    phi.label = std::move(label);
    return phi;
}

TestFunctional TestFunctional::constant(double c)
{
    auto phi = custom_fn("constant", [c](std::span<const double>) { return c; });
    phi.sup_norm = std::abs(c);
    phi.first_norm = 0.0;
    phi.second_norm = 0.0;
    return phi;
}

double evaluate_spectral(const TestFunctional& phi, std::span<const double> coeffs)
{
    switch (phi.kind) {
    case Kind::CosInner: {
        const auto* v = std::get_if<SpectralField>(&phi.direction);
        if (!v) {
            throw InvalidInput("evaluate_spectral: cos_inner needs a spectral direction");
        }
        double s = 0.0;
        for (std::size_t k = 0; k < std::min(coeffs.size(), v->mode_count()); ++k) {
            s += (*v)[k] * coeffs[k];
        }
        return std::cos(s);
    }
    case Kind::ExpNegSq:
        return std::exp(-phi.scale * std::inner_product(coeffs.begin(), coeffs.end(), coeffs.begin(), 0.0));
    case Kind::SecondMomentH:
        return std::inner_product(coeffs.begin(), coeffs.end(), coeffs.begin(), 0.0);
    case Kind::Custom:
        return phi.custom(coeffs);
    }
    throw InvalidInput("unknown functional kind");
}

}  // namespace spde
