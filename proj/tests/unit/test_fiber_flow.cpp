#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "eirnet/errors.hpp"
#include "eirnet/fiber_flow.hpp"
#include "eirnet/rng.hpp"
#include "eirnet/torus.hpp"

using namespace eirnet;

namespace {

constexpr double pi = std::numbers::pi;

// Independent oracle: classic RK4 on z' = v(z) in the lifted coordinate.
template <typename F>
double rk4(F v, double z, double t, int steps = 200000)
{
    const double h = t / steps;
    for (int k = 0; k < steps; ++k) {
        const double k1 = v(z);
        const double k2 = v(z + 0.5 * h * k1);
        const double k3 = v(z + 0.5 * h * k2);
        const double k4 = v(z + h * k3);
        z += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return wrap(z);
}

auto sine7 = [](double z) { return -7.0 * std::sin(2.0 * pi * z); };

NSFlowSpec tabulated_sine(std::size_t m, double amp)
{
    std::vector<double> s(m);
    for (std::size_t k = 0; k < m; ++k)
        s[k] = -amp * std::sin(2.0 * pi * static_cast<double>(k) / static_cast<double>(m));
    s[m / 2] = 0.0; // exact zero at the north pole
    return NSFlowSpec::tabulated(s, 0.05, 0.05);
}

} // namespace

TEST(FiberFlow, SineOracleQuarterPoint)
{
    const NSFlowSpec f = NSFlowSpec::sine_family(7.0, 0.05, 0.05);
    const double z = ns_evolve(f, 0.25, 0.1).z_end;
    EXPECT_NEAR(z, 0.00391472568322, 1e-13);
    EXPECT_NEAR(z, rk4(sine7, 0.25, 0.1), 1e-11);
}

TEST(FiberFlow, MatchesRk4AcrossCircle)
{
    const NSFlowSpec f = NSFlowSpec::sine_family(7.0, 0.05, 0.05);
    for (double z0 : {0.01, 0.2, 0.45, 0.499, 0.51, 0.7, 0.93}) {
        for (double t : {0.05, 0.3, 0.9}) {
            const double oracle = rk4(sine7, z0, t, 20000);
            EXPECT_LT(circle_distance(ns_evolve(f, z0, t).z_end, oracle), 1e-9)
                << "z0=" << z0 << " t=" << t;
        }
    }
}

TEST(FiberFlow, PolesAreFixedWithLinearisedDerivative)
{
    const NSFlowSpec f = NSFlowSpec::sine_family(7.0, 0.05, 0.05);
    for (double t : {0.1, 0.7, 1.5}) {
        const FlowEvaluation s = ns_evolve(f, 0.0, t);
        EXPECT_EQ(s.z_end, 0.0);
        EXPECT_NEAR(s.dz, std::exp(-14.0 * pi * t), 1e-12 * std::exp(-14.0 * pi * t) + 1e-300);
        const FlowEvaluation nth = ns_evolve(f, 0.5, t);
        EXPECT_EQ(nth.z_end, 0.5);
        EXPECT_NEAR(nth.dz / std::exp(14.0 * pi * t), 1.0, 1e-10);
    }
    EXPECT_NEAR(f.lambda_minus(), -14.0 * pi, 1e-12);
    EXPECT_NEAR(f.lambda_plus(), 14.0 * pi, 1e-12);
}

TEST(FiberFlow, StaysInOwnHalfCircle)
{
    const NSFlowSpec f = NSFlowSpec::sine_family(7.0, 0.05, 0.05);
    Rng rng(5);
    for (int k = 0; k < 2000; ++k) {
        const double z0 = rng.uniform();
        if (z0 == 0.0 || z0 == 0.5)
            continue;
        const double z = ns_evolve(f, z0, rng.uniform(0.0, 3.0)).z_end;
        EXPECT_EQ(in_inhibiting_arc(z), in_inhibiting_arc(z0)) << z0;
    }
}

TEST(FiberFlow, DerivativeMatchesFiniteDifference)
{
    const NSFlowSpec f = NSFlowSpec::sine_family(3.0, 0.05, 0.05);
    for (double z0 : {0.1, 0.3, 0.48, 0.6, 0.9}) {
        const double t = 0.2, h = 1e-7;
        const double fd = circle_difference(ns_evolve(f, z0 + h, t).z_end, ns_evolve(f, z0 - h, t).z_end) / (2 * h);
        EXPECT_NEAR(ns_evolve(f, z0, t).dz / fd, 1.0, 1e-5) << z0;
    }
}

TEST(FiberFlow, SemigroupAndBackwardInverse)
{
    for (const NSFlowSpec& f : {NSFlowSpec::sine_family(7.0, 0.05, 0.05), NSFlowSpec::projective(2.0, 0.05, 0.05),
                                tabulated_sine(64, 2.0)}) {
        Rng rng(9);
        for (int k = 0; k < 50; ++k) {
            const double z0 = rng.uniform(0.05, 0.95);
            const double a = rng.uniform(0.0, 0.3), b = rng.uniform(0.0, 0.3);
            const double ab = ns_evolve(f, z0, a + b).z_end;
            const double a_then_b = ns_evolve(f, ns_evolve(f, z0, a).z_end, b).z_end;
            EXPECT_LT(circle_distance(ab, a_then_b), 1e-9) << to_string(f.kind);
            const double back = ns_evolve_backward(f, ns_evolve(f, z0, a).z_end, a).z_end;
            EXPECT_LT(circle_distance(back, z0), 1e-8) << to_string(f.kind);
        }
    }
}

TEST(FiberFlow, ProjectiveRateIsTwiceAlpha)
{
    const double alpha = 1.5;
    const NSFlowSpec f = NSFlowSpec::projective(alpha, 0.05, 0.05);
    EXPECT_NEAR(f.lambda_plus(), 2.0 * alpha, 1e-14);
    EXPECT_NEAR(f.lambda_minus(), -2.0 * alpha, 1e-14);
    auto v = [alpha](double z) { return -(alpha / pi) * std::sin(2.0 * pi * z); };
    for (double z0 : {0.1, 0.4, 0.77})
        EXPECT_NEAR(ns_evolve(f, z0, 0.4).z_end, rk4(v, z0, 0.4, 20000), 1e-10);
}

TEST(FiberFlow, TabulatedFieldTracksClosedForm)
{
    const NSFlowSpec tab = tabulated_sine(256, 2.0);
    const NSFlowSpec exact = NSFlowSpec::sine_family(2.0, 0.05, 0.05);
    for (double z0 : {0.05, 0.2, 0.35, 0.65, 0.9}) {
        const FlowEvaluation a = ns_evolve(tab, z0, 0.5);
        const FlowEvaluation b = ns_evolve(exact, z0, 0.5);
        EXPECT_EQ(a.method, FlowMethod::rk_integrated);
        EXPECT_LT(circle_distance(a.z_end, b.z_end), 1e-5) << z0;
        EXPECT_NEAR(a.dz / b.dz, 1.0, 1e-3) << z0;
    }
}

TEST(FiberFlow, TabulatedRejectsTooFewSamples)
{
    EXPECT_THROW(NSFlowSpec::tabulated({0.0, -1.0, 0.0}, 0.05, 0.05), InvalidArgument);
}

TEST(FiberFlow, ArcImages)
{
    const NSFlowSpec f = NSFlowSpec::sine_family(7.0, 0.05, 0.2);
    const Arc same = ns_image_of_arc(f, {0.3, 0.6}, 0.0);
    EXPECT_EQ(same.start, 0.3);
    EXPECT_EQ(same.end, 0.6);
    const Arc point = ns_image_of_arc(f, {0.3, 0.3}, 0.5);
    EXPECT_EQ(point.start, point.end);
    // a long flow spreads I+ = [0.45, 0.55] over everything but I-
    const Arc img = ns_image_of_arc(f, {0.45, 0.55}, 1.0);
    EXPECT_TRUE(arc_contains(img, {0.2, 0.8}));
    EXPECT_FALSE(arc_contains({0.2, 0.8}, img));
}
