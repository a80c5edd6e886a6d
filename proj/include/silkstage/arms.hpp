#pragma once

#include <optional>

#include "silkstage/trajectory.hpp"
#include "silkstage/vec2.hpp"

namespace silkstage::arms {

enum class Mode { Active, Softening, Frozen };

const char* to_string(Mode m);

struct SafetyConfig {
    double soften_tau = 0.15;   // s, velocity decay constant
    double freeze_speed = 1e-3; // m/s, below this Softening becomes Frozen
    double recover_time = 5.0;  // s Frozen before re-arming
};

struct ArmState {
    Vec2 grip{};
    Vec2 grip_velocity{};
    Vec2 grip_acceleration{};
    Mode mode = Mode::Active;
    double mode_since = 0.0; // time of the last mode change
    std::optional<GripperTrajectory> active_trajectory;

    bool idle(double now) const {
        return mode == Mode::Active &&
               (!active_trajectory || now >= active_trajectory->end_time);
    }
};

// effective_mass * |grip acceleration| + tension; the joint-load stand-in.
double torque_proxy(const ArmState& arm, double effective_mass, double tension);

// Safety reflex. A raised flag softens an Active arm on the same tick:
// the trajectory is dropped and velocity decays with soften_tau. Below
// freeze_speed the arm freezes; recover_time later (flag-free) it re-arms
// in place. Also advances the commanded kinematics for Softening/Frozen.
ArmState safety_step(const ArmState& arm, bool flag, double tick, double now,
                     const SafetyConfig& cfg = {});

// Commanded kinematics for an Active arm at time t (trajectory or hold).
TrajectorySample command_at(const ArmState& arm, double t);

} // namespace silkstage::arms
