#include "spde/nonlinearity.hpp"

#include "spde/error.hpp"

#include <cmath>
#include <limits>

namespace spde {

Nonlinearity Nonlinearity::zero()
{
    return {"zero", [](double, double) { return 0.0; }, [](double, double) { return 0.0; }, 0.0, 0.0,
            0.0};
}

Nonlinearity Nonlinearity::sine(double scale, double lipschitz)
{
    if (!(scale > 0.0) || !(lipschitz >= 0.0)) {
        throw InvalidInput("Nonlinearity::sine: scale must be positive, lipschitz nonnegative");
    }
    const double freq = lipschitz / scale;
    return {"sin",
            [scale, freq](double, double u) { return scale * std::sin(freq * u); },
            [scale, freq](double, double u) { return scale * freq * std::cos(freq * u); },
            scale,
            lipschitz,
            scale * freq * freq};
}

Nonlinearity Nonlinearity::constant(double c)
{
    return {"constant", [c](double, double) { return c; }, [](double, double) { return 0.0; },
            std::abs(c), 0.0, 0.0};
}

Nonlinearity Nonlinearity::identity()
{
    return {"identity", [](double, double u) { return u; }, [](double, double) { return 1.0; },
            std::numeric_limits<double>::infinity(), 1.0, 0.0};
}

bool validate_bounds(const Nonlinearity& nl, double R, double slack, int xi_samples, int u_samples)
{
    const double du = 2.0 * R / (u_samples - 1);
    const double fd = 1e-4;
    for (int i = 0; i < xi_samples; ++i) {
        const double xi = static_cast<double>(i) / (xi_samples - 1);
        for (int j = 0; j < u_samples; ++j) {
            const double u = -R + j * du;
            if (std::abs(nl.g(xi, u)) > nl.g_bound + slack) {
                return false;
            }
            if (std::abs(nl.dg_du(xi, u)) > nl.lipschitz + slack) {
                return false;
            }
            // Central difference of dg/du; its own truncation error is O(fd^2).
            const double second = (nl.dg_du(xi, u + fd) - nl.dg_du(xi, u - fd)) / (2.0 * fd);
            if (std::abs(second) > nl.second_bound + slack + 1e-6 * (1.0 + nl.second_bound)) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace spde
