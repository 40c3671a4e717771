#include "spde/error.hpp"
#include "spde/fem.hpp"
#include "spde/spectral.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace spde;

namespace {

double slope(const std::vector<double>& h, const std::vector<double>& e)
{
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        mx += std::log(h[i]);
        my += std::log(e[i]);
    }
    mx /= h.size();
    my /= h.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        sxx += (std::log(h[i]) - mx) * (std::log(h[i]) - mx);
        sxy += (std::log(h[i]) - mx) * (std::log(e[i]) - my);
    }
    return sxy / sxx;
}

Mesh jittered_mesh(std::size_t n, unsigned seed)
{
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    std::vector<double> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i] = (static_cast<double>(i + 1) + u(gen)) / static_cast<double>(n + 1);
    }
    return Mesh::from_interior(pts);
}

double e0(double x) { return eigenfunction(0, x); }
double de0(double x) { return std::sqrt(2.0) * kPi * std::cos(kPi * x); }

}  // namespace

TEST(Assemble, UniformThree)
{
    const auto op = assemble(Mesh::uniform(3));
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(op.stiffness().diag[i], 8.0, 1e-12);
        EXPECT_NEAR(op.mass().diag[i], 1.0 / 6.0, 1e-15);
    }
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_NEAR(op.stiffness().sub[i], -4.0, 1e-12);
        EXPECT_NEAR(op.mass().sub[i], 1.0 / 24.0, 1e-15);
    }
    EXPECT_TRUE(op.mass().is_symmetric());
    EXPECT_TRUE(op.stiffness().is_symmetric());
    EXPECT_GE(op.eigenvalues()[0], kPi * kPi);
}

TEST(Assemble, SingleInteriorNode)
{
    const auto op = assemble(Mesh::uniform(1));
    EXPECT_NEAR(op.stiffness().diag[0], 4.0, 1e-14);
    EXPECT_NEAR(op.mass().diag[0], 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(op.eigenvalues()[0], 12.0, 1e-12);
}

TEST(Assemble, MassMatchesQuadratureOfHats)
{
    // Independent oracle: <phi_i, phi_j> by fine midpoint integration of the hat functions.
    const auto mesh = jittered_mesh(6, 1);
    const FemOperator op(mesh);
    const auto hat = [&](std::size_t j, double x) {
        const double a = mesh.nodes()[j], b = mesh.nodes()[j + 1], c = mesh.nodes()[j + 2];
        if (x <= a || x >= c) return 0.0;
        return x < b ? (x - a) / (b - a) : (c - x) / (c - b);
    };
    const int n = 200000;
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = i; j < std::min<std::size_t>(i + 2, 6); ++j) {
            double s = 0;
            for (int q = 0; q < n; ++q) {
                const double x = (q + 0.5) / n;
                s += hat(i, x) * hat(j, x) / n;
            }
            const double entry = i == j ? op.mass().diag[i] : op.mass().super[i];
            EXPECT_NEAR(entry, s, 1e-7);
        }
    }
}

TEST(GeneralizedEigs, UniformClosedForm)
{
    const std::size_t n = 31;
    const FemOperator op(Mesh::uniform(n));
    const double d = 1.0 / (n + 1);
    const auto lambdas = op.eigenvalues();
    for (std::size_t j = 1; j <= n; ++j) {
        const double c = std::cos(j * kPi * d);
        const double closed = 6.0 / (d * d) * (1.0 - c) / (2.0 + c);
        EXPECT_NEAR(lambdas[j - 1], closed, 1e-9 * closed);
    }
}

TEST(GeneralizedEigs, AgreesWithDenseGeneralizedSolver)
{
    const FemOperator op(jittered_mesh(25, 2));
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ref(op.stiffness().to_dense(), op.mass().to_dense());
    const auto lambdas = op.eigenvalues();
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
        EXPECT_NEAR(lambdas[j], ref.eigenvalues()(j), 1e-9 * lambdas[j]);
    }
}

TEST(GeneralizedEigs, ResidualAndOrthonormality)
{
    const FemOperator op(jittered_mesh(60, 3));
    const auto& pairs = op.eigenpairs();
    ASSERT_EQ(pairs.size(), 60u);
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        const auto kv = op.stiffness().multiply(pairs[j].vector);
        const auto mv = op.mass().multiply(pairs[j].vector);
        double r = 0;
        for (std::size_t i = 0; i < kv.size(); ++i) {
            r = std::max(r, std::abs(kv[i] - pairs[j].lambda * mv[i]));
        }
        EXPECT_LE(r, 1e-8 * pairs[j].lambda);
        for (std::size_t k = 0; k < pairs.size(); k += 7) {
            double ip = 0;
            for (std::size_t i = 0; i < mv.size(); ++i) {
                ip += pairs[k].vector[i] * mv[i];
            }
            EXPECT_NEAR(ip, j == k ? 1.0 : 0.0, 1e-10);
        }
        if (j > 0) {
            EXPECT_LT(pairs[j - 1].lambda, pairs[j].lambda);
        }
    }
    EXPECT_GE(pairs[0].lambda, kPi * kPi);
}

TEST(GeneralizedEigs, FirstEigenvalueApproachesFromAbove)
{
    double previous = INFINITY;
    for (std::size_t n : {3, 7, 15, 31, 63}) {
        const double l = FemOperator(Mesh::uniform(n)).eigenvalues()[0];
        EXPECT_GT(l, kPi * kPi);
        EXPECT_LT(l, previous);
        previous = l;
    }
    EXPECT_LT(previous / (kPi * kPi) - 1.0, 0.05);
}

TEST(L2Project, ReproducesPiecewiseLinear)
{
    const auto mesh = jittered_mesh(9, 4);
    const FemOperator op(mesh);
    std::vector<double> values(9);
    for (std::size_t j = 0; j < 9; ++j) {
        values[j] = std::cos(3.0 * j);
    }
    const auto f = op.make_field(values);
    const auto p = l2_project(op, [&](double x) { return f.evaluate_at(x); });
    for (std::size_t j = 0; j < 9; ++j) {
        EXPECT_NEAR(p[j], values[j], 1e-10);
    }
}

TEST(L2Project, ZeroFunction)
{
    const FemOperator op(Mesh::uniform(5));
    const auto p = l2_project(op, [](double) { return 0.0; });
    for (double v : p.values()) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(L2Project, SecondOrderForFirstMode)
{
    std::vector<double> hs, errs;
    for (std::size_t n : {15, 31, 63, 127}) {
        const FemOperator op(Mesh::uniform(n));
        hs.push_back(op.mesh().h());
        errs.push_back(l2_distance(l2_project(op, e0), e0));
    }
    EXPECT_NEAR(slope(hs, errs), 2.0, 0.2);
}

TEST(RitzProject, ReproducesPiecewiseLinear)
{
    const auto mesh = jittered_mesh(7, 5);
    const FemOperator op(mesh);
    std::vector<double> values{0.3, -1.0, 2.0, 0.0, 0.5, 1.5, -0.25};
    const auto f = op.make_field(values);
    const auto r = ritz_project(op, [&](double x) { return f.evaluate_at(x); });
    for (std::size_t j = 0; j < values.size(); ++j) {
        EXPECT_NEAR(r[j], values[j], 1e-10);
    }
}

TEST(RitzProject, RatesForFirstMode)
{
    std::vector<double> hs, l2, energy;
    for (std::size_t n : {15, 31, 63, 127}) {
        const FemOperator op(Mesh::uniform(n));
        const auto r = ritz_project(op, e0);
        hs.push_back(op.mesh().h());
        l2.push_back(l2_distance(r, e0));
        energy.push_back(h1_seminorm_distance(r, de0));
    }
    EXPECT_NEAR(slope(hs, l2), 2.0, 0.2);
    EXPECT_NEAR(slope(hs, energy), 1.0, 0.1);
}

TEST(RitzProject, RequiresBoundaryZeros)
{
    const FemOperator op(Mesh::uniform(3));
    EXPECT_THROW((void)ritz_project(op, [](double) { return 1.0; }), InvalidInput);
}

TEST(Trace, SingleNode)
{
    // One interior node: K = 4, M = 1/3, so the only eigenvalue is 12.
    EXPECT_NEAR(trace_neg_half_power(FemOperator(Mesh::uniform(1)), 0.25), std::pow(12.0, -0.75), 1e-12);
}

TEST(Trace, IncreasingAndBounded)
{
    const double bound = std::pow(kPi, -1.5) * std::riemann_zeta(1.5);
    double previous = 0;
    for (std::size_t n : {15, 31, 63, 127}) {
        const double t = trace_neg_half_power(FemOperator(Mesh::uniform(n)), 0.25);
        EXPECT_GT(t, previous);
        EXPECT_LT(t, bound);
        previous = t;
    }
}

TEST(Trace, NearHalfStaysBelowContinuousSeries)
{
    const double t = trace_neg_half_power(FemOperator(Mesh::uniform(127)), 0.4999);
    EXPECT_LT(t, (1.0 / 6.0) * 1.1);
}

TEST(Trace, KappaOutOfRange)
{
    EXPECT_THROW((void)trace_neg_half_power(FemOperator(Mesh::uniform(3)), 0.5), InvalidInput);
}

TEST(SemiImplicitSolve, RoundTrip)
{
    const FemOperator op(jittered_mesh(20, 6));
    std::vector<double> y(20);
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = std::sin(0.7 * i) + 0.1;
    }
    const double tau = 0.05;
    const auto rhs = TridiagonalMatrix::combine(1.0, op.mass(), tau, op.stiffness()).multiply(y);
    const auto x = semi_implicit_solve(op, tau, rhs);
    for (std::size_t i = 0; i < y.size(); ++i) {
        EXPECT_NEAR(x[i], y[i], 1e-10 * std::abs(y[i]) + 1e-14);
    }
}

TEST(SemiImplicitSolve, EigenvectorIsScaled)
{
    const FemOperator op(Mesh::uniform(15));
    const double tau = 0.1;
    for (std::size_t j : {0, 4, 14}) {
        const auto& p = op.eigenpairs()[j];
        const auto x = semi_implicit_solve(op, tau, op.mass().multiply(p.vector));
        for (std::size_t i = 0; i < x.size(); ++i) {
            EXPECT_NEAR(x[i], p.vector[i] / (1.0 + tau * p.lambda), 1e-11);
        }
    }
}

TEST(SemiImplicitSolve, ZeroTauInvertsMass)
{
    const FemOperator op(Mesh::uniform(6));
    const std::vector<double> y{1, 2, 3, 4, 5, 6};
    const auto x = semi_implicit_solve(op, 0.0, op.mass().multiply(y));
    for (std::size_t i = 0; i < y.size(); ++i) {
        EXPECT_NEAR(x[i], y[i], 1e-12);
    }
}

TEST(SemiImplicitSolve, Contraction)
{
    const FemOperator op(Mesh::uniform(31));
    for (double tau : {0.1, 0.01}) {
        for (double l : op.eigenvalues()) {
            EXPECT_LE(1.0 / (1.0 + tau * l), 1.0 / (1.0 + tau * kPi * kPi));
        }
    }
}

TEST(Smoothing, NoViolationsOnEigenvalueGrids)
{
    for (std::size_t n : {7, 31, 127}) {
        const FemOperator op(Mesh::uniform(n));
        for (double kappa : {0.0, 0.25, 0.5}) {
            for (double tau : {0.1, 0.01}) {
                EXPECT_EQ(smoothing_violations(op.eigenvalues(), kappa, tau, 200, kPi * kPi), 0u);
            }
        }
    }
}

TEST(Smoothing, DetectsAViolation)
{
    // An eigenvalue below lambda0 is rejected; a bound that is too tight is counted.
    const std::vector<double> lambdas{10.0};
    EXPECT_THROW((void)smoothing_violations(lambdas, 0.0, 0.1, 1, 20.0), InvalidInput);
    EXPECT_EQ(smoothing_violations(lambdas, 0.5, 0.1, 1, 10.0), 0u);
}

TEST(NormEquivalence, RatioStaysInEnvelope)
{
    std::mt19937 gen(7);
    std::normal_distribution<double> d;
    for (std::size_t n : {15, 31, 63, 127, 255}) {
        const FemOperator op(Mesh::uniform(n));
        std::vector<double> x(n);
        for (auto& v : x) {
            v = d(gen);
        }
        // |(-A)^{1/2} x_h| = |x_h'|; |(-A)^{-1/2} x_h|^2 = sum_k <x_h, e_k>^2 / lambda_k.
        const auto kx = op.stiffness().multiply(x);
        double h1 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            h1 += x[i] * kx[i];
        }
        double neg = 0;
        for (std::size_t k = 0; k < 8 * (n + 1); ++k) {
            const auto b = sine_load(op.mesh(), k);
            double c = 0;
            for (std::size_t i = 0; i < n; ++i) {
                c += b[i] * x[i];
            }
            neg += c * c / eigenvalue(k);
        }
        const double r_pos = std::sqrt(h1) / op.discrete_sobolev_norm(0.5, x);
        const double r_neg = std::sqrt(neg) / op.discrete_sobolev_norm(-0.5, x);
        EXPECT_NEAR(r_pos, 1.0, 1e-9);  // energy norms coincide on V_h
        EXPECT_GE(r_neg, 0.3);
        EXPECT_LE(r_neg, 3.5);
    }
}

TEST(SineLoad, MatchesFineSimpson)
{
    const auto mesh = jittered_mesh(40, 8);
    const auto nodes = mesh.nodes();
    for (std::size_t k : {0, 3, 10}) {
        const auto exact = sine_load(mesh, k);
        for (std::size_t j = 0; j < exact.size(); ++j) {
            // Composite Simpson of e_k * phi_j over each half of the hat's support.
            double ref = 0;
            for (std::size_t side = 0; side < 2; ++side) {
                const double a = nodes[j + side];
                const double b = nodes[j + side + 1];
                const int n = 2000;
                const double d = (b - a) / n;
                for (int i = 0; i <= n; ++i) {
                    const double x = a + i * d;
                    const double hat = side == 0 ? (x - a) / (b - a) : (b - x) / (b - a);
                    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
                    ref += w * d / 3.0 * hat * eigenfunction(k, x);
                }
            }
            EXPECT_NEAR(exact[j], ref, 1e-10);
        }
    }
}

TEST(SineLoad, GaussLoadConvergesAtFourthOrder)
{
    std::vector<double> hs;
    std::vector<double> errs;
    for (std::size_t n : {16, 32, 64, 128}) {
        const auto mesh = Mesh::uniform(n - 1);
        const auto exact = sine_load(mesh, 3);
        const auto gauss = load_vector(mesh, [](double x) { return eigenfunction(3, x); });
        double e = 0;
        for (std::size_t j = 0; j < exact.size(); ++j) {
            e = std::max(e, std::abs(exact[j] - gauss[j]));
        }
        hs.push_back(mesh.h());
        errs.push_back(e);
    }
    // Per-hat error of the 2-point Gauss rule is O(h^5).
    EXPECT_NEAR(slope(hs, errs), 5.0, 0.3);
}

TEST(NodalField, NormIsMassQuadraticForm)
{
    const FemOperator op(Mesh::uniform(4));
    const std::vector<double> x{1, -1, 2, 0};
    const auto f = op.make_field(x);
    EXPECT_NEAR(op.norm_squared(x), std::pow(l2_distance(f, [](double) { return 0.0; }), 2), 1e-12);
    EXPECT_EQ(f.evaluate_at(0.0), 0.0);
    EXPECT_NEAR(f.evaluate_at(0.6), 2.0, 1e-12);
    EXPECT_NEAR(f.evaluate_at(0.5), 0.5, 1e-12);
    EXPECT_NEAR(f.evaluate_at(0.3), 0.5 * (1.0 + -1.0) + 0.0, 1e-12);
}
