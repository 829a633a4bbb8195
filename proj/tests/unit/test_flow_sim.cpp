#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "eirnet/flow_sim.hpp"
#include "eirnet/return_map.hpp"
#include "fixtures.hpp"

using namespace eirnet;

TEST(FlowSim, SectionHitsReproduceTheReturnMap)
{
    const ModelParams p = fixtures::n2_params();
    Rng rng(12);
    const SectionPoint p0 = random_section_point(2, rng);
    std::vector<SectionPoint> hits;
    std::vector<double> hit_times;
    FlowState s = FlowState::from_section(p0);
    // generous horizon: every return takes at most b + tau_max
    const double horizon = 1000.0 * (p.b + p.tau_max());
    evolve_in_place(s, horizon, p, [&](const FlowEvent& e) {
        if (e.kind == FlowEventKind::reached_section_0 && hits.size() < 1000) {
            hits.push_back(e.state->section_point());
            hit_times.push_back(e.t);
        }
    });
    ASSERT_EQ(hits.size(), 1000u);
    SectionPoint q = p0;
    double t = 0.0;
    for (std::size_t k = 0; k < hits.size(); ++k) {
        const StepRecord rec = step(q, p);
        t += p.b + rec.tau;
        q = rec.next;
        EXPECT_LT(circle_distance(q.x, hits[k].x), 1e-8) << k;
        EXPECT_LT(circle_distance(q.y, hits[k].y), 1e-8) << k;
        for (std::size_t i = 0; i < 2; ++i)
            EXPECT_LT(circle_distance(q.z[i], hits[k].z[i]), 1e-8) << k;
        EXPECT_NEAR(hit_times[k], t, 1e-8 * t);
        // continue from the flow's own point so small differences cannot compound
        q = hits[k];
    }
}

TEST(FlowSim, SemigroupProperty)
{
    const ModelParams p = fixtures::n2_params();
    Rng rng(30);
    for (int k = 0; k < 50; ++k) {
        const FlowState s0 = FlowState::from_section(random_section_point(2, rng));
        const double a = rng.uniform(0.0, 3.0), b = rng.uniform(0.0, 3.0);
        const FlowState one = evolve(s0, a + b, p);
        const FlowState two = evolve(evolve(s0, a, p), b, p);
        EXPECT_NEAR(one.t, two.t, 1e-12);
        EXPECT_NEAR(one.w, two.w, 1e-9);
        EXPECT_LT(circle_distance(one.x, two.x), 1e-9);
        for (std::size_t i = 0; i < 2; ++i)
            EXPECT_LT(circle_distance(one.z[i], two.z[i]), 1e-8) << k;
    }
}

TEST(FlowSim, SuspensionIsASawtoothWithoutInhibition)
{
    ModelParams p = fixtures::n2_params();
    p.phi.table = {0.0, 0.0, 0.0};
    Rng rng(2);
    const FlowState s0 = FlowState::from_section(random_section_point(2, rng));
    const auto rows = sample_trajectory(s0, 10.0, 0.05, p);
    ASSERT_EQ(rows.size(), 201u);
    for (const auto& r : rows)
        EXPECT_NEAR(r.w, r.t - std::floor(r.t + 1e-9), 1e-9) << r.t;
}

TEST(FlowSim, RasterEventsAreOrderedAndDeterministic)
{
    const ModelParams p = fixtures::n2_params();
    Rng rng(6);
    const FlowState s0 = FlowState::from_section(random_section_point(2, rng));
    // run to the 40th return so both sides cover the same complete phases
    SectionPoint q = s0.section_point();
    std::size_t from_map = 0;
    double t_end = 0.0;
    for (int k = 0; k < 40; ++k) {
        const StepRecord rec = step(q, p);
        from_map += rec.activations.size();
        t_end += p.b + rec.tau;
        q = rec.next;
    }
    const auto r1 = activation_raster(s0, t_end, p);
    const auto r2 = activation_raster(s0, t_end, p);
    ASSERT_EQ(r1.size(), r2.size());
    ASSERT_FALSE(r1.empty());
    for (std::size_t k = 0; k < r1.size(); ++k) {
        EXPECT_EQ(r1[k].t, r2[k].t);
        EXPECT_EQ(r1[k].unit, r2[k].unit);
        if (k) {
            EXPECT_LE(r1[k - 1].t, r1[k].t);
        }
    }
    EXPECT_EQ(r1.size(), from_map);
}

TEST(FlowSim, IdenticalUnitsFireTogether)
{
    ModelParams p = fixtures::n2_params();
    p.rotations[1] = p.rotations[0];
    Rng rng(1);
    SectionPoint p0 = random_section_point(2, rng);
    p0.z[1] = p0.z[0];
    const auto raster = activation_raster(FlowState::from_section(p0), 100.0, p);
    std::vector<double> t0, t1;
    for (const auto& e : raster)
        (e.unit == 0 ? t0 : t1).push_back(e.t);
    ASSERT_EQ(t0, t1);
    EXPECT_NEAR(activation_correlation(raster, 0, 1, 0.0, 100.0, 1.0), 1.0, 1e-12);
}

TEST(FlowSim, RejectsNegativeTime)
{
    const ModelParams p = fixtures::n2_params();
    FlowState s = FlowState::from_section({0.1, 0.2, {0.3, 0.4}});
    EXPECT_THROW(evolve_in_place(s, -1.0, p), InvalidArgument);
    EXPECT_THROW(sample_trajectory(s, 1.0, 0.0, p), InvalidArgument);
}
