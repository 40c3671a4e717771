#include "spde/error.hpp"
#include "spde/nonlinearity.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace spde;

TEST(Nonlinearity, SineDefault)
{
    const auto nl = Nonlinearity::sine();
    EXPECT_DOUBLE_EQ(nl.g(0.3, 0.7), std::sin(0.7));
    EXPECT_DOUBLE_EQ(nl.dg_du(0.3, 0.7), std::cos(0.7));
    EXPECT_EQ(nl.g_bound, 1.0);
    EXPECT_EQ(nl.lipschitz, 1.0);
    EXPECT_TRUE(validate_bounds(nl));
}

TEST(Nonlinearity, SineScaled)
{
    const auto nl = Nonlinearity::sine(2.0, 0.5);
    EXPECT_NEAR(nl.g(0.0, 1.0), 2.0 * std::sin(0.25), 1e-15);
    EXPECT_NEAR(nl.dg_du(0.0, 1.0), 0.5 * std::cos(0.25), 1e-15);
    EXPECT_EQ(nl.g_bound, 2.0);
    EXPECT_EQ(nl.lipschitz, 0.5);
    EXPECT_TRUE(validate_bounds(nl));
}

TEST(Nonlinearity, SineRejectsBadParameters)
{
    EXPECT_THROW((void)Nonlinearity::sine(0.0, 1.0), InvalidInput);
    EXPECT_THROW((void)Nonlinearity::sine(1.0, -1.0), InvalidInput);
}

TEST(Nonlinearity, ZeroAndConstant)
{
    const auto z = Nonlinearity::zero();
    EXPECT_EQ(z.g(0.5, 3.0), 0.0);
    EXPECT_EQ(z.lipschitz, 0.0);
    EXPECT_TRUE(validate_bounds(z));
    const auto c = Nonlinearity::constant(-0.4);
    EXPECT_EQ(c.g(0.1, 100.0), -0.4);
    EXPECT_EQ(c.dg_du(0.1, 100.0), 0.0);
    EXPECT_EQ(c.g_bound, 0.4);
    EXPECT_TRUE(validate_bounds(c));
}

TEST(Nonlinearity, IdentityIsUnbounded)
{
    const auto id = Nonlinearity::identity();
    EXPECT_EQ(id.g(0.2, -3.0), -3.0);
    EXPECT_TRUE(std::isinf(id.g_bound));
    auto capped = id;
    capped.g_bound = 10.0;
    EXPECT_FALSE(validate_bounds(capped));
}

TEST(Nonlinearity, UnderstatedBoundsAreDetected)
{
    auto nl = Nonlinearity::sine();
    nl.lipschitz = 0.5;
    EXPECT_FALSE(validate_bounds(nl));
    nl = Nonlinearity::sine();
    nl.g_bound = 0.9;
    EXPECT_FALSE(validate_bounds(nl));
}
