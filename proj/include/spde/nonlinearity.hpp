#pragma once

#include <functional>
#include <string>

namespace spde {

/// Nemytskii nonlinearity F(x)(xi) = g(xi, x(xi)) with declared bounds.
///
/// `g_bound` = sup|g|, `lipschitz` = sup|dg/du| (the constant L_F), `second_bound` =
/// sup|d2g/du2|. The regularity exponent eta of the abstract assumptions is kept as
/// metadata only; nothing branches on it.
struct Nonlinearity {
    std::string name;
    std::function<double(double, double)> g;
    std::function<double(double, double)> dg_du;
    double g_bound = 0.0;
    double lipschitz = 0.0;
    double second_bound = 0.0;
    double eta = 0.5;

    /// g = 0.
    static Nonlinearity zero();
    /// g(xi, u) = scale * sin(u / scale * lipschitz) with sup|g| = scale and L_F = lipschitz.
    /// The default gives g = sin(u), L_F = 1.
    static Nonlinearity sine(double scale = 1.0, double lipschitz = 1.0);
    /// g = c.
    static Nonlinearity constant(double c);
    /// g(xi, u) = u. Unbounded, only meaningful for round-trip checks.
    static Nonlinearity identity();
};

/// Best-effort check of the declared bounds on the grid [0,1] x [-R, R].
/// Returns true when every sampled |g|, |dg/du| and finite-difference |d2g/du2| is
/// within its bound plus `slack`.
[[nodiscard]] bool validate_bounds(const Nonlinearity& nl, double R = 50.0, double slack = 1e-9,
                                   int xi_samples = 21, int u_samples = 2001);

}  // namespace spde
