#include "ectl/zoom.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "ectl/errors.hpp"

using namespace ectl;

namespace {

Vec v1(double x) { return Vec::Constant(1, x); }

}  // namespace

TEST(Containment, RadiusMatchesSmallestEigenvalue) {
    Mat p(2, 2);
    p << 2.0, 0.0, 0.0, 0.5;
    ContainmentRegion r = containment_region(p, 1.0, 3);
    EXPECT_NEAR(r.radius_sq, 0.5 * 2.5 * 2.5, 1e-15);

    Vec boundary(2);
    boundary << 0.0, 2.5;  // x' P x = 3.125 exactly
    EXPECT_TRUE(r.contains(boundary));
    Vec outside(2);
    outside << 0.0, 2.5 + 1e-9;
    EXPECT_FALSE(r.contains(outside));
    EXPECT_TRUE(r.contains(Vec::Zero(2)));
}

TEST(Containment, ScalarPinned) {
    ContainmentRegion r = containment_region(Mat::Constant(1, 1, 2.0), 0.5, 5);
    EXPECT_NEAR(r.radius_sq, 10.125, 1e-15);
}

TEST(LinearZoom, ZoomOutSensitivityGrowsAsSquaredPower) {
    ZoomState z = ZoomState::linear(2.0, 0.5, 4.0, 1.0, 10);
    EXPECT_EQ(z.phase(), ZoomPhase::ZoomOut);
    EXPECT_EQ(z.delta(0), 1.0);
    EXPECT_EQ(z.delta(1), 4.0);
    EXPECT_EQ(z.delta(3), 64.0);
}

TEST(LinearZoom, NoCaptureAtTimeZero) {
    ZoomState z = ZoomState::linear(2.0, 0.5, 4.0, 1.0, 10);
    EXPECT_EQ(z.observe(0, v1(0.0)), ZoomEvent::None);
    EXPECT_EQ(z.phase(), ZoomPhase::ZoomOut);
    EXPECT_EQ(z.observe(1, v1(0.0)), ZoomEvent::Captured);
}

TEST(LinearZoom, CaptureThresholdIsInclusive) {
    // delta(1) = 4: x = 15 quantizes to level 4, which is exactly the bar.
    ZoomState z = ZoomState::linear(2.0, 0.5, 4.0, 1.0, 10);
    EXPECT_EQ(z.observe(1, v1(15.0)), ZoomEvent::Captured);
    EXPECT_EQ(z.capture_time(), 1);
    EXPECT_EQ(z.delta0(), 4.0);

    ZoomState z2 = ZoomState::linear(2.0, 0.5, 4.0, 1.0, 10);
    EXPECT_EQ(z2.observe(1, v1(19.0)), ZoomEvent::None);  // level 5
    EXPECT_EQ(z2.phase(), ZoomPhase::ZoomOut);
    // one step later the coarser sensitivity quantizes the same state to 1
    EXPECT_EQ(z2.observe(2, v1(19.0)), ZoomEvent::Captured);
    EXPECT_EQ(z2.capture_time(), 2);
    EXPECT_EQ(z2.delta0(), 16.0);
    EXPECT_EQ(z2.stage(), 0);
    EXPECT_EQ(z2.phase(), ZoomPhase::ZoomIn);
    // after capture the sensitivity no longer depends on t
    EXPECT_EQ(z2.delta(2), 16.0);
    EXPECT_EQ(z2.delta(100), 16.0);
}

TEST(LinearZoom, StageAdvanceRules) {
    ZoomState z = ZoomState::linear(2.0, 0.5, 4.0, 1.0, 10);
    ASSERT_EQ(z.observe(2, v1(19.0)), ZoomEvent::Captured);  // delta0 = 16

    // same-step observation after the capture event must not advance
    EXPECT_EQ(z.observe(2, v1(0.0)), ZoomEvent::None);
    EXPECT_EQ(z.stage(), 0);

    // level 1 at delta 16 sits exactly on the update bar: advance
    EXPECT_EQ(z.observe(3, v1(20.0)), ZoomEvent::Advanced);
    EXPECT_EQ(z.stage(), 1);
    EXPECT_EQ(z.delta(3), 8.0);

    // level 2 at delta 8 exceeds the bar: hold
    EXPECT_EQ(z.observe(4, v1(20.0)), ZoomEvent::None);
    EXPECT_EQ(z.stage(), 1);
}

TEST(LinearZoom, NeverFreezes) {
    ZoomState z = ZoomState::linear(2.0, 0.5, 4.0, 1.0, 10);
    ASSERT_EQ(z.observe(1, v1(0.0)), ZoomEvent::Captured);
    for (long t = 2; t < 40; ++t) {
        EXPECT_EQ(z.observe(t, v1(0.0)), ZoomEvent::Advanced);
        EXPECT_EQ(z.phase(), ZoomPhase::ZoomIn);
    }
    EXPECT_EQ(z.stage(), 38);
}

TEST(LinearZoom, StageSensitivityIsExactPower) {
    ZoomState z = ZoomState::linear(2.0, 0.6, 4.0, 1.0, 10);
    ASSERT_EQ(z.observe(2, v1(0.0)), ZoomEvent::Captured);
    double delta0 = z.delta0();
    for (long t = 3; t < 30; ++t) {
        ASSERT_EQ(z.observe(t, v1(0.0)), ZoomEvent::Advanced);
        // bitwise: the schedule is defined as pow(omega, stage) * delta0,
        // never as an incremental product that could drift
        EXPECT_EQ(z.delta(t), std::pow(0.6, static_cast<double>(z.stage())) * delta0);
    }
}

TEST(LinearZoom, ZoomOutOverflowIsReported) {
    ZoomState z = ZoomState::linear(2.0, 0.5, -1.0, 1.0, 10);  // unreachable capture bar
    long t = 1;
    EXPECT_THROW(
        {
            for (; t < 2000; ++t) z.observe(t, v1(1e300));
        },
        OverflowDetected);
    EXPECT_LT(t, 600);  // 2^(2t) leaves double range at t = 512
}

TEST(NonlinearZoom, StartsCaptured) {
    ZoomState z = ZoomState::nonlinear(0.125, 0.5, 1.0, 10, 2);
    EXPECT_EQ(z.phase(), ZoomPhase::ZoomIn);
    EXPECT_EQ(z.stage(), 0);
    EXPECT_EQ(z.capture_time(), 0);
    EXPECT_EQ(z.delta0(), 0.125);
    EXPECT_EQ(z.delta(0), 0.125);

    EXPECT_EQ(z.observe(0, v1(0.0)), ZoomEvent::None);  // construction counts as the event at t=0
    EXPECT_EQ(z.observe(1, v1(0.0)), ZoomEvent::Advanced);
    EXPECT_EQ(z.delta(1), 0.0625);
    EXPECT_EQ(z.observe(2, v1(0.0)), ZoomEvent::Frozen);
    EXPECT_EQ(z.phase(), ZoomPhase::Frozen);
    EXPECT_EQ(z.stage(), 2);
    EXPECT_EQ(z.delta(2), 0.03125);
    EXPECT_EQ(z.observe(3, v1(0.0)), ZoomEvent::None);
    EXPECT_EQ(z.stage(), 2);
}

TEST(NonlinearZoom, ZeroFreezeStageFreezesImmediately) {
    ZoomState z = ZoomState::nonlinear(0.25, 0.5, 1.0, 10, 0);
    EXPECT_EQ(z.phase(), ZoomPhase::Frozen);
    EXPECT_EQ(z.observe(1, v1(0.0)), ZoomEvent::None);
    EXPECT_EQ(z.delta(1), 0.25);
}

TEST(NonlinearZoom, NegativeFreezeStageRejected) {
    EXPECT_THROW(ZoomState::nonlinear(0.25, 0.5, 1.0, 10, -1), ConfigError);
}

TEST(ZoomUnderflow, ParksAtLastPositiveStage) {
    // delta0 near the bottom of the double range: the schedule must stop
    // advancing before the sensitivity underflows to zero.
    ZoomState z = ZoomState::nonlinear(1e-300, 0.5, 1.0, 10, 1000000);
    for (long t = 1; t <= 200; ++t) z.observe(t, v1(0.0));
    int parked = z.stage();
    EXPECT_LT(parked, 120);
    EXPECT_GT(z.delta(200), 0.0);
    EXPECT_EQ(z.observe(201, v1(0.0)), ZoomEvent::None);
    EXPECT_EQ(z.stage(), parked);
    EXPECT_EQ(z.phase(), ZoomPhase::ZoomIn);
}
