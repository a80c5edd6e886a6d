#include <cmath>

#include "doctest.h"
#include "silkstage/arms.hpp"

using namespace silkstage;
using namespace silkstage::arms;

namespace {

ArmState moving_arm(double vz) {
    ArmState a;
    a.grip = Vec2{-0.6, 1.0};
    a.grip_velocity = Vec2{0.0, vz};
    MotionPrimitive p{0.3, 0.0, 0.0};
    a.active_trajectory = render_primitive(p, ArmLimits{}, std::nullopt, 0.0, a.grip);
    return a;
}

} // namespace

TEST_CASE("torque proxy arithmetic") {
    ArmState a;
    SUBCASE("at rest with slack silk") {
        CHECK(torque_proxy(a, 0.5, 0.0) == 0.0);
    }
    SUBCASE("acceleration 10, mass 0.5, tension 1") {
        a.grip_acceleration = Vec2{0.0, 10.0};
        CHECK(torque_proxy(a, 0.5, 1.0) == doctest::Approx(6.0));
    }
}

TEST_CASE("no flag leaves an active arm alone") {
    ArmState a = moving_arm(1.0);
    ArmState b = safety_step(a, false, 0.015, 2.0);
    CHECK(b.mode == Mode::Active);
    CHECK(b.grip == a.grip);
    CHECK(b.grip_velocity == a.grip_velocity);
    CHECK(b.active_trajectory.has_value());
}

TEST_CASE("flag softens on the same tick and velocity decays") {
    const double tick = 0.015;
    ArmState a = moving_arm(1.0);
    double now = 0.0;

    a = safety_step(a, true, tick, now);
    CHECK(a.mode == Mode::Softening);
    CHECK_FALSE(a.active_trajectory.has_value());
    now += tick;

    // three time constants (0.45 s) bring 1 m/s underterminal 0.05 m/s
    while (now < 0.45 - 1e-12) {
        a = safety_step(a, false, tick, now);
        now += tick;
    }
    CHECK(a.grip_velocity.norm() < 0.05);
    CHECK(a.mode == Mode::Softening); // still above the freeze threshold
}

TEST_CASE("softening freezes below 1e-3 m/s, then re-arms after 5 s") {
    const double tick = 0.02;
    ArmState a = moving_arm(1.0);
    double now = 0.0;
    a = safety_step(a, true, tick, now);
    now += tick;
    while (a.mode == Mode::Softening) {
        a = safety_step(a, false, tick, now);
        now += tick;
    }
    CHECK(a.mode == Mode::Frozen);
    // analytic freeze time: 0.15 * ln(1000) ~= 1.036 s
    CHECK(now == doctest::Approx(0.15 * std::log(1000.0)).epsilon(0.05));

    const Vec2 frozen_pose = a.grip;
    const double frozen_at = a.mode_since;

    // frozen = no motion, to the bit
    for (int i = 0; i < 50; ++i) {
        a = safety_step(a, false, tick, now);
        now += tick;
        CHECK(a.grip == frozen_pose);
        CHECK(a.grip_velocity == Vec2{});
    }
    CHECK(a.mode == Mode::Frozen);

    // a flag while frozen restarts the recovery clock
    a = safety_step(a, true, tick, now);
    CHECK(a.mode_since == now);
    now += tick;

    // 5 flag-free seconds re-arm in place
    while (a.mode == Mode::Frozen) {
        a = safety_step(a, false, tick, now);
        now += tick;
    }
    CHECK(a.mode == Mode::Active);
    CHECK(a.grip == frozen_pose);
    CHECK_FALSE(a.active_trajectory.has_value());
    CHECK(now - frozen_at >= 5.0);
}

TEST_CASE("softening never jumps farther than the velocity allows") {
    const double tick = 0.02;
    ArmState a = moving_arm(1.2);
    a.grip_velocity = Vec2{0.3, 1.2};
    double now = 0.0;
    bool flag = true;
    while (a.mode != Mode::Frozen) {
        Vec2 before = a.grip;
        double speed = a.grip_velocity.norm();
        a = safety_step(a, flag, tick, now);
        flag = false;
        now += tick;
        CHECK((a.grip - before).norm() <= speed * tick + 1e-12);
    }
}

TEST_CASE("command_at holds the pose when no trajectory is active") {
    ArmState a;
    a.grip = Vec2{0.6, 1.1};
    TrajectorySample s = command_at(a, 3.0);
    CHECK(s.grip == a.grip);
    CHECK(s.velocity == Vec2{});
}
