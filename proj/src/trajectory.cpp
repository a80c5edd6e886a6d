#include "silkstage/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "silkstage/errors.hpp"

namespace silkstage::arms {

namespace {

// Durations of a jerk-limited point-to-point move over distance d >= 0:
// [ramp, hold-accel, ramp, cruise, ramp, hold-accel, ramp], |jerk| = j.
struct MoveTimes {
    double tj = 0.0; // jerk ramp
    double tc = 0.0; // constant-accel hold
    double tv = 0.0; // cruise
};

MoveTimes plan_move(double d, double vmax, double amax, double jmax) {
    MoveTimes mt;
    if (d <= 0.0) return mt;

    // Peak velocity actually reachable over d.
    double vp;
    if (vmax * jmax >= amax * amax) {
        // accel trapezoid possible
        double ta_full = vmax / amax + amax / jmax; // 0 -> vmax
        if (d >= vmax * ta_full) {
            vp = vmax;
        } else {
            // no cruise; try triangular accel first
            double vtri = std::cbrt(d * d * jmax / 4.0); // (d/2)^(2/3) j^(1/3)
            if (vtri * jmax <= amax * amax) {
                vp = vtri;
            } else {
                // trapezoidal accel, no cruise: vp^2/a + vp*a/j = d
                double tja = amax / jmax;
                vp = 0.5 * (-amax * tja + std::sqrt(amax * amax * tja * tja + 4.0 * d * amax));
            }
        }
    } else {
        // amax unreachable at any speed <= vmax: always triangular accel
        double ta_full = 2.0 * std::sqrt(vmax / jmax);
        if (d >= vmax * ta_full) {
            vp = vmax;
        } else {
            vp = std::cbrt(d * d * jmax / 4.0);
        }
    }

    if (vp * jmax >= amax * amax) {
        mt.tj = amax / jmax;
        mt.tc = vp / amax - mt.tj;
    } else {
        mt.tj = std::sqrt(vp / jmax);
        mt.tc = 0.0;
    }
    double ta = 2.0 * mt.tj + mt.tc; // 0 -> vp
    mt.tv = std::max(0.0, (d - vp * ta) / vp);
    return mt;
}

struct PhaseSpec {
    double duration;
    double jerk;
};

void append_move(std::vector<PhaseSpec>& specs, double d, double dir, const ArmLimits& l) {
    MoveTimes mt = plan_move(d, l.v_max, l.a_max, l.j_max);
    if (mt.tj <= 0.0) return;
    double j = dir * l.j_max;
    specs.push_back({mt.tj, j});
    specs.push_back({mt.tc, 0.0});
    specs.push_back({mt.tj, -j});
    specs.push_back({mt.tv, 0.0});
    specs.push_back({mt.tj, -j});
    specs.push_back({mt.tc, 0.0});
    specs.push_back({mt.tj, j});
}

} // namespace

void validate(const ArmLimits& l) {
    auto bad = [](const char* f) {
        throw InvalidParameterError(std::string("arm limit out of range: ") + f);
    };
    if (!(std::isfinite(l.v_max) && l.v_max > 0.0)) bad("v_max");
    if (!(std::isfinite(l.a_max) && l.a_max > 0.0)) bad("a_max");
    if (!(std::isfinite(l.j_max) && l.j_max > 0.0)) bad("j_max");
    if (!(std::isfinite(l.torque_max) && l.torque_max > 0.0)) bad("torque_max");
    if (!(std::isfinite(l.tension_max) && l.tension_max > 0.0)) bad("tension_max");
    if (!(std::isfinite(l.stroke_max) && l.stroke_max > 0.0)) bad("stroke_max");
}

GripperTrajectory render_primitive(const MotionPrimitive& p, const ArmLimits& limits,
                                   const std::optional<silk::CrestEvent>& last_crest,
                                   double now, Vec2 baseline) {
    validate(limits);
    if (!(std::isfinite(p.lift_amplitude) && p.lift_amplitude >= 0.0 &&
          std::isfinite(p.snap_phase) && p.snap_phase >= 0.0 && std::isfinite(p.dwell) &&
          p.dwell >= 0.0)) {
        throw InvalidPrimitiveError("primitive fields must be finite and non-negative");
    }

    GripperTrajectory traj;
    traj.start_time = now;
    traj.baseline = baseline;
    traj.amplitude_rendered = std::min(p.lift_amplitude, limits.stroke_max);
    traj.clipped = p.lift_amplitude > limits.stroke_max;

    double phase_anchor = last_crest ? last_crest->time : now;
    double snap_start = std::max(now + p.dwell, phase_anchor + p.snap_phase);

    std::vector<PhaseSpec> specs;
    specs.push_back({snap_start - now, 0.0}); // hold
    if (traj.amplitude_rendered > 0.0) {
        append_move(specs, traj.amplitude_rendered, +1.0, limits);
        append_move(specs, traj.amplitude_rendered, -1.0, limits);
    }

    // Integrate phase-start states once; sample() just walks them.
    double t = now, z = 0.0, v = 0.0, a = 0.0;
    for (const PhaseSpec& ps : specs) {
        traj.phases.push_back({t, ps.duration, ps.jerk, z, v, a});
        double dt = ps.duration;
        z += v * dt + 0.5 * a * dt * dt + ps.jerk * dt * dt * dt / 6.0;
        v += a * dt + 0.5 * ps.jerk * dt * dt;
        a += ps.jerk * dt;
        t += dt;
    }
    traj.end_time = t;
    return traj;
}

TrajectorySample sample(const GripperTrajectory& traj, double t) {
    TrajectorySample out;
    out.grip = traj.baseline;
    if (traj.phases.empty() || t < traj.start_time) return out;
    if (t >= traj.end_time) {
        const auto& last = traj.phases.back();
        double dt = last.duration;
        out.grip.z += last.z0 + last.v0 * dt + 0.5 * last.a0 * dt * dt +
                      last.jerk * dt * dt * dt / 6.0;
        return out; // at rest after the move
    }
    // find the containing phase (phases are few; linear walk)
    const GripperTrajectory::Phase* ph = &traj.phases.back();
    for (const auto& cand : traj.phases) {
        if (t < cand.t0 + cand.duration) {
            ph = &cand;
            break;
        }
    }
    double dt = t - ph->t0;
    out.grip.z += ph->z0 + ph->v0 * dt + 0.5 * ph->a0 * dt * dt + ph->jerk * dt * dt * dt / 6.0;
    out.velocity.z = ph->v0 + ph->a0 * dt + 0.5 * ph->jerk * dt * dt;
    out.acceleration.z = ph->a0 + ph->jerk * dt;
    return out;
}

} // namespace silkstage::arms
