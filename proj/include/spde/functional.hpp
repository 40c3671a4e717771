#pragma once

#include "spde/fem.hpp"
#include "spde/spectral.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>

namespace spde {

/// Test functional phi evaluated along a trajectory.
///
///   CosInner(v):    phi(x) = cos<x, v>
///   ExpNegSq(s):    phi(x) = exp(-s |x|_H^2)
///   SecondMomentH:  phi(x) = |x|_H^2 (unbounded; used with exact linear oracles)
///   Custom(f):      phi(x) = f(raw state coordinates)
///
/// The sup-norms of phi, Dphi and D^2phi are recorded when known.
struct TestFunctional {
    enum class Kind { CosInner, ExpNegSq, SecondMomentH, Custom };

    Kind kind = Kind::CosInner;
    std::variant<std::monostate, SpectralField, NodalField> direction;
    double scale = 1.0;
    std::function<double(std::span<const double>)> custom;
    std::string label;

    std::optional<double> sup_norm;
    std::optional<double> first_norm;
    std::optional<double> second_norm;

    static TestFunctional cos_inner(SpectralField direction);
    static TestFunctional cos_inner(NodalField direction);
    /// cos<x, e_mode>.
    static TestFunctional cos_mode(std::size_t mode);
    static TestFunctional exp_neg_sq(double scale);
    static TestFunctional second_moment();
    static TestFunctional custom_fn(std::string label, std::function<double(std::span<const double>)> f);
    static TestFunctional constant(double c);

    [[nodiscard]] const std::string& name() const noexcept { return label; }
};

/// phi at a point of H_M given by its eigen-coefficients. Nodal directions are not
/// supported here; bind through a Scheme instead.
[[nodiscard]] double evaluate_spectral(const TestFunctional& phi, std::span<const double> coeffs);

}  // namespace spde
