#include "spde/error.hpp"
#include "spde/fem.hpp"
#include "spde/gaussian_oracle.hpp"
#include "spde/scheme.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <vector>

using namespace spde;

namespace {

SchemeConfig spectral_cfg(std::size_t M, double tau, std::size_t steps, std::uint64_t seed = 1)
{
    SchemeConfig cfg;
    cfg.variant = SpectralVariant{M};
    cfg.tau = tau;
    cfg.steps = steps;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST(SampleNoiseSpectral, Deterministic)
{
    NoiseSource a(3, 0);
    NoiseSource b(3, 0);
    EXPECT_EQ(sample_noise_spectral(10, 0.1, a), sample_noise_spectral(10, 0.1, b));
    EXPECT_EQ(a.counter(), 1u);
}

TEST(SampleNoiseSpectral, MeanAndCovariance)
{
    NoiseSource src(99, 0);
    constexpr int kDraws = 1000000;
    double m0 = 0;
    double c01 = 0;
    for (int n = 0; n < kDraws; ++n) {
        const auto xi = sample_noise_spectral(1, 0.1, src);
        m0 += xi[0];
        c01 += xi[0] * xi[1];
    }
    EXPECT_NEAR(m0 / kDraws, 0.0, 0.004);
    EXPECT_NEAR(c01 / kDraws, 0.0, 0.004);
}

TEST(SampleNoiseSpectral, RejectsNonpositiveTau)
{
    NoiseSource src(1, 0);
    EXPECT_THROW((void)sample_noise_spectral(3, 0.0, src), InvalidInput);
}

TEST(SampleNoiseFem, CovarianceIsMass)
{
    const FemOperator op(Mesh::uniform(3));
    NoiseSource src(5, 0);
    constexpr int kDraws = 100000;
    const double tau = 0.1;
    double cov[3][3] = {};
    for (int n = 0; n < kDraws; ++n) {
        const auto z = sample_noise_fem(op, tau, src);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                cov[i][j] += z[i] * z[j] / tau;
            }
        }
    }
    const double expect[3][3] = {{1.0 / 6, 1.0 / 24, 0}, {1.0 / 24, 1.0 / 6, 1.0 / 24}, {0, 1.0 / 24, 1.0 / 6}};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            EXPECT_NEAR(cov[i][j] / kDraws, expect[i][j], 0.01);
        }
    }
}

TEST(SampleNoiseFem, VarianceScalesWithTau)
{
    const FemOperator op(Mesh::uniform(3));
    double var[2] = {};
    const double taus[2] = {0.1, 0.2};
    constexpr int kDraws = 100000;
    for (int t = 0; t < 2; ++t) {
        NoiseSource src(6, static_cast<std::uint64_t>(t));
        for (int n = 0; n < kDraws; ++n) {
            const auto z = sample_noise_fem(op, taus[t], src);
            var[t] += z[1] * z[1];
        }
    }
    EXPECT_NEAR(var[1] / var[0], 2.0, 0.1);
}

TEST(NemytskiiLoadFem, Examples)
{
    const FemOperator op(Mesh::uniform(3));
    const auto x = op.make_field({0.3, -1.0, 2.0});
    for (double b : nemytskii_load_fem(op, Nonlinearity::zero(), x)) {
        EXPECT_EQ(b, 0.0);
    }
    for (double b : nemytskii_load_fem(op, Nonlinearity::constant(1.0), x)) {
        EXPECT_NEAR(b, 0.25, 1e-14);
    }
    const auto b = nemytskii_load_fem(op, Nonlinearity::identity(), x);
    const auto mx = op.mass().multiply(x.values());
    for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_NEAR(b[j], mx[j], 1e-12);
    }
}

TEST(NemytskiiLoadFem, IdentityOnJitteredMesh)
{
    const FemOperator op(Mesh::from_interior(std::vector<double>{0.1, 0.15, 0.4, 0.8, 0.85}));
    const auto x = op.make_field({1.0, -2.0, 0.5, 3.0, -1.0});
    const auto b = nemytskii_load_fem(op, Nonlinearity::identity(), x);
    const auto mx = op.mass().multiply(x.values());
    for (std::size_t j = 0; j < b.size(); ++j) {
        EXPECT_NEAR(b[j], mx[j], 1e-12);
    }
}

TEST(NemytskiiProjectSpectral, Zero)
{
    SpectralField x(8);
    x[2] = 1.5;
    const auto f = nemytskii_project_spectral(7, Nonlinearity::zero(), x);
    for (double c : f.coeffs()) {
        EXPECT_EQ(c, 0.0);
    }
}

TEST(NemytskiiProjectSpectral, IdentityRoundTrip)
{
    SpectralField x(21);
    for (std::size_t k = 0; k < 21; ++k) {
        x[k] = std::cos(0.7 * static_cast<double>(k)) / static_cast<double>(k + 1);
    }
    const auto f = nemytskii_project_spectral(20, Nonlinearity::identity(), x);
    for (std::size_t k = 0; k < 21; ++k) {
        EXPECT_NEAR(f[k], x[k], 1e-10);
    }
}

TEST(NemytskiiProjectSpectral, ConstantMatchesExactIntegrals)
{
    const std::size_t M = 63;
    const auto f = nemytskii_project_spectral(M, Nonlinearity::constant(1.0), SpectralField(M + 1));
    for (std::size_t k = 0; k <= M; ++k) {
        const double m = static_cast<double>(k + 1);
        const double exact = std::sqrt(2.0) * (1.0 - std::cos(m * kPi)) / (m * kPi);
        EXPECT_NEAR(f[k], exact, 1e-3) << "mode " << k;
    }
}

TEST(NemytskiiProjectSpectral, SineAgainstFineQuadrature)
{
    // Independent oracle: composite Simpson of sin(x(xi)) e_k(xi) on 4000 panels.
    const std::size_t M = 15;
    SpectralField x(M + 1);
    x[0] = 1.2;
    x[1] = -0.4;
    x[3] = 0.3;
    const auto f = nemytskii_project_spectral(M, Nonlinearity::sine(), x);
    const int n = 4000;
    for (std::size_t k = 0; k <= M; ++k) {
        double ref = 0;
        for (int i = 0; i <= n; ++i) {
            const double xi = static_cast<double>(i) / n;
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            ref += w / (3.0 * n) * std::sin(x.evaluate_at(xi)) * eigenfunction(k, xi);
        }
        EXPECT_NEAR(f[k], ref, 2e-3) << "mode " << k;
    }
}

TEST(NemytskiiProjectSpectral, RejectsWrongModeCount)
{
    EXPECT_THROW((void)nemytskii_project_spectral(4, Nonlinearity::sine(), SpectralField(4)), InvalidInput);
}

TEST(SpectralScheme, NoiselessResolvent)
{
    const SpectralScheme s(3, 0.1, std::nullopt);
    auto ws = s.make_workspace();
    std::vector<double> x{1.0, 0.0, 0.0, 0.0};
    const std::vector<double> zero(4, 0.0);
    s.step(x, zero, ws);
    EXPECT_NEAR(x[0], 1.0 / (1.0 + 0.1 * kPi * kPi), 1e-15);
    EXPECT_NEAR(x[0], 0.5033, 1e-4);
}

TEST(SpectralScheme, StepVarianceFromZero)
{
    auto cfg = spectral_cfg(2, 0.1, 1);
    NoiseSource src(17, 0);
    constexpr int kDraws = 100000;
    double var = 0;
    for (int n = 0; n < kDraws; ++n) {
        const auto y = step_spectral(SpectralField(3), cfg, src);
        var += y[0] * y[0];
    }
    const double expect = 0.1 / std::pow(1.0 + 0.1 * kPi * kPi, 2);
    EXPECT_NEAR(expect, 0.02533, 1e-5);
    EXPECT_NEAR(var / kDraws, expect, 0.05 * expect);
}

TEST(SpectralScheme, ZeroNonlinearityMatchesLinearBitForBit)
{
    const auto lin = spectral_cfg(9, 0.05, 1);
    auto zero = lin;
    zero.nonlinearity = Nonlinearity::zero();
    SpectralField x(10);
    x[0] = 0.4;
    x[5] = -0.2;
    SpectralField y = x;
    NoiseSource a(8, 0);
    NoiseSource b(8, 0);
    for (int i = 0; i < 20; ++i) {
        x = step_spectral(x, lin, a);
        y = step_spectral(y, zero, b);
        EXPECT_EQ(x, y);
    }
}

TEST(SpectralScheme, StepFormulaWithDrift)
{
    const double tau = 0.02;
    const auto nl = Nonlinearity::sine();
    const SpectralScheme s(5, tau, nl);
    auto ws = s.make_workspace();
    SpectralField x(6);
    x[0] = 0.8;
    x[2] = -0.3;
    const auto f = nemytskii_project_spectral(5, nl, x);
    const std::vector<double> xi{0.5, -1.0, 0.25, 2.0, 0.0, -0.75};
    std::vector<double> y(x.coeffs().begin(), x.coeffs().end());
    s.step(y, xi, ws);
    for (std::size_t k = 0; k < 6; ++k) {
        const double expect = (x[k] + tau * f[k] + std::sqrt(tau) * xi[k]) / (1.0 + tau * eigenvalue(k));
        EXPECT_NEAR(y[k], expect, 1e-14);
    }
}

TEST(SpectralScheme, JacobianMatchesFiniteDifferences)
{
    const std::size_t M = 4;
    const SpectralScheme s(M, 0.1, Nonlinearity::sine());
    auto ws = s.make_workspace();
    std::vector<double> x{0.9, -0.3, 0.2, 0.0, 0.1};
    const auto J = s.nemytskii_jacobian(x, ws);
    const double d = 1e-6;
    for (std::size_t j = 0; j <= M; ++j) {
        auto xp = x;
        auto xm = x;
        xp[j] += d;
        xm[j] -= d;
        std::vector<double> fp(M + 1);
        std::vector<double> fm(M + 1);
        s.nemytskii(xp, fp, ws);
        s.nemytskii(xm, fm, ws);
        for (std::size_t i = 0; i <= M; ++i) {
            EXPECT_NEAR(J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), (fp[i] - fm[i]) / (2 * d),
                        1e-7);
        }
    }
}

TEST(FemScheme, EigenvectorDecaysByResolvent)
{
    const auto op = std::make_shared<const FemOperator>(Mesh::uniform(15));
    const double tau = 0.05;
    const FemScheme s(op, tau, std::nullopt);
    auto ws = s.make_workspace();
    const std::vector<double> zero(15, 0.0);
    for (std::size_t j : {0, 4, 14}) {
        const auto& p = op->eigenpairs()[j];
        auto x = p.vector;
        s.step(x, zero, ws);
        for (std::size_t i = 0; i < x.size(); ++i) {
            EXPECT_NEAR(x[i], p.vector[i] / (1.0 + tau * p.lambda), 1e-10);
        }
    }
}

TEST(FemScheme, SmallTauConsistency)
{
    const auto op = std::make_shared<const FemOperator>(Mesh::uniform(15));
    std::vector<double> x0(15);
    for (std::size_t i = 0; i < 15; ++i) {
        const double xi = op->mesh().interior_node(i);
        x0[i] = std::sin(kPi * xi) + 0.5 * std::sin(3.0 * kPi * xi);
    }
    // -M^{-1} K x0 through an independent dense solve.
    const auto kx = op->stiffness().multiply(x0);
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(15, 15);
    for (std::size_t i = 0; i < 15; ++i) {
        mass(i, i) = op->mass().diag[i];
        if (i + 1 < 15) {
            mass(i, i + 1) = mass(i + 1, i) = op->mass().sub[i];
        }
    }
    const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(kx.data(), 15);
    const Eigen::VectorXd expect = -mass.ldlt().solve(rhs);
    auto relative_error = [&](double tau) {
        const FemScheme s(op, tau, std::nullopt);
        auto ws = s.make_workspace();
        auto x1 = x0;
        s.step(x1, std::vector<double>(15, 0.0), ws);
        double num = 0;
        double den = 0;
        for (std::size_t i = 0; i < 15; ++i) {
            const double e = expect(static_cast<Eigen::Index>(i));
            const double diff = (x1[i] - x0[i]) / tau - e;
            num += diff * diff;
            den += e * e;
        }
        return std::sqrt(num / den);
    };
    const double e1 = relative_error(1e-4);
    const double e2 = relative_error(5e-5);
    EXPECT_LE(e1, 0.02);
    // First order: halving tau halves the defect.
    EXPECT_NEAR(e1 / e2, 2.0, 0.1);
}

TEST(FemScheme, DeterministicTrajectory)
{
    SchemeConfig cfg;
    cfg.variant = fem_variant(Mesh::uniform(7));
    cfg.tau = 0.05;
    cfg.steps = 50;
    cfg.seed = 12;
    cfg.nonlinearity = Nonlinearity::sine();
    std::vector<std::vector<double>> a;
    std::vector<std::vector<double>> b;
    (void)simulate(cfg, [&](std::size_t, std::span<const double> x) { a.emplace_back(x.begin(), x.end()); });
    (void)simulate(cfg, [&](std::size_t, std::span<const double> x) { b.emplace_back(x.begin(), x.end()); });
    ASSERT_EQ(a.size(), 50u);
    EXPECT_EQ(a, b);
}

TEST(StepFem, MatchesFemSchemeStep)
{
    SchemeConfig cfg;
    const auto fv = fem_variant(Mesh::uniform(5));
    cfg.variant = fv;
    cfg.tau = 0.1;
    cfg.nonlinearity = Nonlinearity::sine();
    const auto x = fv.op->make_field({0.1, 0.2, 0.3, 0.2, 0.1});
    NoiseSource src(4, 0);
    const auto y = step_fem(x, cfg, src);
    const FemScheme s(fv.op, cfg.tau, cfg.nonlinearity);
    auto ws = s.make_workspace();
    std::vector<double> normals(5);
    NoiseSource(4, 0).normals_at(0, normals);
    std::vector<double> z(x.values().begin(), x.values().end());
    s.step(z, normals, ws);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(y[i], z[i]);
    }
}

TEST(Simulate, ZeroStepsReturnsInitialState)
{
    auto cfg = spectral_cfg(4, 0.1, 0);
    cfg.initial = SpectralField(std::vector<double>{1, 2, 3, 4, 5});
    const auto out = simulate(cfg);
    EXPECT_EQ(std::get<SpectralField>(out), cfg.initial);
}

TEST(Simulate, ObserverSeesEveryStep)
{
    auto cfg = spectral_cfg(2, 0.1, 25);
    std::size_t calls = 0;
    std::size_t last = 0;
    (void)simulate(cfg, [&](std::size_t m, std::span<const double>) {
        EXPECT_EQ(m, calls);
        last = m;
        ++calls;
    });
    EXPECT_EQ(calls, 25u);
    EXPECT_EQ(last, 24u);
}

TEST(Simulate, LinearModeZeroStationaryVariance)
{
    auto cfg = spectral_cfg(4, 0.05, 220000, 31);
    cfg.burn_in = 20000;
    // Batch means of x_0^2 over 2e5 post burn-in steps.
    constexpr std::size_t kBatch = 2000;
    std::vector<double> batches;
    double acc = 0;
    std::size_t fill = 0;
    (void)simulate(cfg, [&](std::size_t m, std::span<const double> x) {
        if (m < cfg.burn_in) {
            return;
        }
        acc += x[0] * x[0];
        if (++fill == kBatch) {
            batches.push_back(acc / kBatch);
            acc = 0;
            fill = 0;
        }
    });
    double mean = 0;
    for (double b : batches) {
        mean += b;
    }
    mean /= static_cast<double>(batches.size());
    double var = 0;
    for (double b : batches) {
        var += (b - mean) * (b - mean);
    }
    var /= static_cast<double>(batches.size() - 1);
    const double se = std::sqrt(var / static_cast<double>(batches.size()));
    const double l0 = eigenvalue(0);
    const double expect = 1.0 / (2.0 * l0 + l0 * l0 * cfg.tau);
    EXPECT_NEAR(expect, mode_variance(LinearInvariantLaw::discrete_time_spectral(cfg.tau), 0), 1e-15);
    EXPECT_LE(std::abs(mean - expect), 3.0 * se);
}

TEST(SchemeConfig, Validation)
{
    auto cfg = spectral_cfg(2, 0.1, 10);
    EXPECT_NO_THROW(cfg.validate());
    cfg.tau = 0.0;
    EXPECT_THROW(cfg.validate(), InvalidInput);
    cfg.tau = 2.0;
    EXPECT_THROW(cfg.validate(), InvalidInput);
    cfg.tau = 0.1;
    cfg.burn_in = 10;
    EXPECT_THROW(cfg.validate(), InvalidInput);
}

TEST(SynchronousCoupling, IdenticalStartsStayTogether)
{
    auto cfg = spectral_cfg(8, 0.01, 30, 2);
    cfg.nonlinearity = Nonlinearity::sine();
    SpectralField x(9);
    x[0] = 1.0;
    const auto gaps = synchronous_coupling_gaps(cfg, x, x);
    ASSERT_EQ(gaps.size(), 31u);
    for (double g : gaps) {
        EXPECT_EQ(g, 0.0);
    }
}

TEST(SynchronousCoupling, GapContractsEveryStep)
{
    // With L_F < lambda_0 each step is a contraction by (1 + tau L_F)/(1 + tau lambda_0) at most.
    auto cfg = spectral_cfg(8, 0.01, 40, 3);
    cfg.nonlinearity = Nonlinearity::sine();
    SpectralField x(9);
    SpectralField y(9);
    x[0] = 1.0;
    y[1] = -2.0;
    const auto gaps = synchronous_coupling_gaps(cfg, x, y);
    const double factor = (1.0 + cfg.tau) / (1.0 + cfg.tau * eigenvalue(0));
    for (std::size_t m = 1; m < gaps.size(); ++m) {
        EXPECT_LE(gaps[m], factor * gaps[m - 1] * (1.0 + 1e-12));
    }
}
