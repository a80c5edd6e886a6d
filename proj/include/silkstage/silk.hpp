#pragma once

#include <optional>
#include <vector>

#include "silkstage/rng.hpp"
#include "silkstage/vec2.hpp"

namespace silkstage::silk {

struct SilkParams {
    int node_count = 33;              // grips plus interior nodes, >= 3
    double total_mass = 0.05;         // kg, spread evenly over nodes
    double stiffness = 40.0;          // N/m per segment
    double damping = 0.02;            // N*s/m per node
    double segment_rest_length = 0.0390625; // m (32 segments -> 1.25 m sheet)
    double gravity = 9.81;            // m/s^2 downward
    double air_drag = 0.005;          // N*s/m per node

    double node_mass() const { return total_mass / node_count; }
};

void validate(const SilkParams& p); // throws InvalidParameterError

struct SilkState {
    std::vector<Vec2> positions;
    std::vector<Vec2> velocities;
    double time = 0.0;

    int node_count() const { return static_cast<int>(positions.size()); }
};

struct CrestEvent {
    double time = 0.0;
    int node_index = 0;
    double height = 0.0;
};

// One sample of the peak-height series as seen by the crest detector.
struct HeightSample {
    double time = 0.0;
    double peak = 0.0;
    int node_index = 0; // interior node attaining the peak
};

// Nodes placed on the damped-relaxation equilibrium between the grips,
// velocities zero, time zero.
SilkState init_rest(const SilkParams& params, Vec2 grip_a, Vec2 grip_b);

// Semi-implicit Euler step. Boundary nodes are pinned to the commanded grips
// (velocity = (new-old)/dt) before interior forces are evaluated, so a grip
// impulse reaches node k only at step k.
SilkState step(const SilkState& state, const SilkParams& params, Vec2 grip_a, Vec2 grip_b,
               double dt);

// Same update, force/integration loops run under OpenMP. Bit-identical to
// step(); kept separate so tests and the bench can compare the two paths.
SilkState step_parallel(const SilkState& state, const SilkParams& params, Vec2 grip_a,
                        Vec2 grip_b, double dt);

// Max z over interior nodes.
double peak_height(const SilkState& state);

// Interior node attaining peak_height (lowest index on ties).
int peak_node(const SilkState& state);

enum class Side { A, B };

// |spring force| in the segment adjacent to the named boundary node.
double tension_proxy(const SilkState& state, const SilkParams& params, Side side);

// Crest = the middle of the three most recent samples is a strict local max
// above rest_level + noise_floor. History must be time-ordered.
std::optional<CrestEvent> detect_crest(const std::vector<HeightSample>& history,
                                       double rest_level, double noise_floor = 0.005);

struct RandomizationSpans {
    double total_mass = 1.0;
    double damping = 1.0;
    double air_drag = 1.0;
};

// Log-uniform scaling of mass/damping/drag; other fields unchanged.
SilkParams randomize_params(const SilkParams& base, const RandomizationSpans& spans, Rng& rng);

// Kinetic + elastic energy with the given params (gravity excluded).
double mechanical_energy(const SilkState& state, const SilkParams& params);

} // namespace silkstage::silk
