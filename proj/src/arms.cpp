#include "silkstage/arms.hpp"

#include <cmath>

namespace silkstage::arms {

const char* to_string(Mode m) {
    switch (m) {
    case Mode::Active: return "Active";
    case Mode::Softening: return "Softening";
    case Mode::Frozen: return "Frozen";
    }
    return "?";
}

double torque_proxy(const ArmState& arm, double effective_mass, double tension) {
    return effective_mass * arm.grip_acceleration.norm() + tension;
}

static ArmState soften_advance(ArmState arm, double tick, double now,
                               const SafetyConfig& cfg) {
    const double decay = std::exp(-tick / cfg.soften_tau);
    const Vec2 v0 = arm.grip_velocity;
    const Vec2 v1 = v0 * decay;
    // exact integral of the exponential tail over this tick
    arm.grip += v0 * (cfg.soften_tau * (1.0 - decay));
    arm.grip_velocity = v1;
    arm.grip_acceleration = (v1 - v0) / tick;
    if (v1.norm() < cfg.freeze_speed) {
        arm.mode = Mode::Frozen;
        arm.mode_since = now + tick;
        arm.grip_velocity = Vec2{};
        arm.grip_acceleration = Vec2{};
    }
    return arm;
}

ArmState safety_step(const ArmState& arm, bool flag, double tick, double now,
                     const SafetyConfig& cfg) {
    switch (arm.mode) {
    case Mode::Active:
        if (flag) {
            ArmState next = arm;
            next.mode = Mode::Softening;
            next.mode_since = now;
            next.active_trajectory.reset();
            return soften_advance(next, tick, now, cfg);
        }
        return arm; // normal motion is the trajectory's business
    case Mode::Softening:
        return soften_advance(arm, tick, now, cfg);
    case Mode::Frozen: {
        ArmState next = arm;
        next.grip_velocity = Vec2{};
        next.grip_acceleration = Vec2{};
        if (flag) {
            next.mode_since = now; // recovery clock restarts while flags persist
        } else if (now + tick - next.mode_since >= cfg.recover_time) {
            next.mode = Mode::Active;
            next.mode_since = now + tick;
            next.active_trajectory.reset(); // re-arm in place, idle
        }
        return next;
    }
    }
    return arm;
}

TrajectorySample command_at(const ArmState& arm, double t) {
    if (arm.active_trajectory)
        return sample(*arm.active_trajectory, t);
    return TrajectorySample{arm.grip, Vec2{}, Vec2{}};
}

} // namespace silkstage::arms
