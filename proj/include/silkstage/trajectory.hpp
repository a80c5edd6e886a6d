#pragma once

#include <optional>
#include <vector>

#include "silkstage/silk.hpp"
#include "silkstage/vec2.hpp"

namespace silkstage::arms {

// The policy's action: how large to lift, when to time the snap, how long to
// hold still first.
struct MotionPrimitive {
    double lift_amplitude = 0.0; // m, >= 0
    double snap_phase = 0.0;     // s after the last detected crest
    double dwell = 0.0;          // s of stillness before acting
};

struct ArmLimits {
    double v_max = 1.5;       // m/s
    double a_max = 10.0;      // m/s^2
    double j_max = 100.0;     // m/s^3
    double torque_max = 8.0;  // N, threshold on the torque proxy
    double tension_max = 6.0; // N
    double stroke_max = 0.5;  // m, longest rendered lift
};

void validate(const ArmLimits& l);

// Vertical-axis profile made of constant-jerk phases. Starts and ends at rest.
struct GripperTrajectory {
    struct Phase {
        double t0 = 0.0;       // absolute start time of the phase
        double duration = 0.0;
        double jerk = 0.0;
        // state at phase start, relative to baseline z
        double z0 = 0.0;
        double v0 = 0.0;
        double a0 = 0.0;
    };

    double start_time = 0.0;
    double end_time = 0.0;
    Vec2 baseline{};
    std::vector<Phase> phases;
    double amplitude_rendered = 0.0; // after any stroke clipping
    bool clipped = false;            // requested stroke exceeded stroke_max

    bool active_at(double t) const { return t >= start_time && t < end_time; }
};

struct TrajectorySample {
    Vec2 grip{};
    Vec2 velocity{};
    Vec2 acceleration{};
};

// Hold for the primitive's dwell, then snap up by the (possibly clipped)
// amplitude and back down, at max(now + dwell, crest.time + snap_phase).
GripperTrajectory render_primitive(const MotionPrimitive& p, const ArmLimits& limits,
                                   const std::optional<silk::CrestEvent>& last_crest,
                                   double now, Vec2 baseline);

// Closed-form evaluation. Before start: baseline at rest; after end: final
// pose at rest.
TrajectorySample sample(const GripperTrajectory& traj, double t);

} // namespace silkstage::arms
