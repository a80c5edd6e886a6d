#include "silkstage/silk.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "silkstage/errors.hpp"

namespace silkstage::silk {

namespace {

bool finite(double x) { return std::isfinite(x); }

// Spring force exerted on node i by node j (symmetric Hooke, resists
// compression as well as stretch).
inline Vec2 spring_force(const Vec2& xi, const Vec2& xj, double k, double rest) {
    Vec2 d = xj - xi;
    double len = d.norm();
    if (len <= 0.0) return {0.0, 0.0};
    double f = k * (len - rest);
    return d * (f / len);
}

inline Vec2 force_on_node(const SilkState& s, const SilkParams& p, int i) {
    const double m = p.node_mass();
    Vec2 f = spring_force(s.positions[i], s.positions[i - 1], p.stiffness, p.segment_rest_length) +
             spring_force(s.positions[i], s.positions[i + 1], p.stiffness, p.segment_rest_length);
    f.z -= m * p.gravity;
    f -= s.velocities[i] * (p.damping + p.air_drag);
    return f;
}

void pin_boundaries(SilkState& s, Vec2 grip_a, Vec2 grip_b, double dt) {
    const int n = s.node_count();
    s.velocities[0] = (grip_a - s.positions[0]) / dt;
    s.velocities[n - 1] = (grip_b - s.positions[n - 1]) / dt;
    s.positions[0] = grip_a;
    s.positions[n - 1] = grip_b;
}

void check_step_args(const SilkParams& p, Vec2 grip_a, Vec2 grip_b, double dt) {
    validate(p);
    if (!(dt > 0.0 && dt <= 0.01))
        throw InvalidParameterError("dt must be in (0, 0.01], got " + std::to_string(dt));
    if (!finite(grip_a.y) || !finite(grip_a.z) || !finite(grip_b.y) || !finite(grip_b.z))
        throw InvalidParameterError("grip positions must be finite");
}

template <bool Parallel>
SilkState step_impl(const SilkState& state, const SilkParams& p, Vec2 grip_a, Vec2 grip_b,
                    double dt) {
    check_step_args(p, grip_a, grip_b, dt);
    const int n = state.node_count();

    SilkState next = state;
    pin_boundaries(next, grip_a, grip_b, dt);

    const double inv_m = 1.0 / p.node_mass();
    std::vector<Vec2> forces(n, Vec2{});
    int bad_node = -1;

    if constexpr (Parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 1; i < n - 1; ++i) {
            forces[i] = force_on_node(next, p, i);
        }
    } else {
        for (int i = 1; i < n - 1; ++i) {
            forces[i] = force_on_node(next, p, i);
        }
    }
    for (int i = 1; i < n - 1 && bad_node < 0; ++i) {
        if (!finite(forces[i].y) || !finite(forces[i].z)) bad_node = i;
    }
    if (bad_node >= 0)
        throw NumericDivergenceError(bad_node, state.time,
                                     "non-finite force at node " + std::to_string(bad_node) +
                                         " (t=" + std::to_string(state.time) + ")");

    if constexpr (Parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 1; i < n - 1; ++i) {
            next.velocities[i] += forces[i] * (dt * inv_m);
            next.positions[i] += next.velocities[i] * dt;
        }
    } else {
        for (int i = 1; i < n - 1; ++i) {
            next.velocities[i] += forces[i] * (dt * inv_m);
            next.positions[i] += next.velocities[i] * dt;
        }
    }
    next.time = state.time + dt;
    return next;
}

} // namespace

void validate(const SilkParams& p) {
    auto bad = [](const std::string& field) {
        throw InvalidParameterError("silk parameter out of range: " + field);
    };
    if (p.node_count < 3) bad("node_count (need >= 3)");
    if (!(finite(p.total_mass) && p.total_mass > 0.0)) bad("total_mass");
    if (!(finite(p.stiffness) && p.stiffness > 0.0)) bad("stiffness");
    if (!(finite(p.segment_rest_length) && p.segment_rest_length > 0.0)) bad("segment_rest_length");
    if (!(finite(p.gravity) && p.gravity >= 0.0)) bad("gravity");
    if (!(finite(p.damping) && p.damping >= 0.0)) bad("damping");
    if (!(finite(p.air_drag) && p.air_drag >= 0.0)) bad("air_drag");
}

SilkState init_rest(const SilkParams& params, Vec2 grip_a, Vec2 grip_b) {
    validate(params);
    const int n = params.node_count;

    SilkState s;
    s.positions.resize(n);
    s.velocities.assign(n, Vec2{});
    s.time = 0.0;
    for (int i = 0; i < n; ++i) {
        double t = static_cast<double>(i) / (n - 1);
        s.positions[i] = grip_a + (grip_b - grip_a) * t;
    }

    // Damped relaxation: overdamped dynamics until the sheet stops creeping.
    SilkParams relax = params;
    relax.damping = std::max(params.damping, 0.35 * params.node_mass() / 0.002);
    relax.air_drag = 0.0;
    const double dt = 0.002;
    const double speed_tol = 1e-5;
    const long max_iters = 4'000'000;
    for (long it = 0; it < max_iters; ++it) {
        s = step_impl<false>(s, relax, grip_a, grip_b, dt);
        double vmax = 0.0;
        for (int i = 1; i < n - 1; ++i) vmax = std::max(vmax, s.velocities[i].norm());
        if (vmax < speed_tol) {
            for (auto& v : s.velocities) v = Vec2{};
            s.time = 0.0;
            return s;
        }
    }
    throw NumericDivergenceError(-1, 0.0, "rest relaxation did not settle");
}

SilkState step(const SilkState& state, const SilkParams& params, Vec2 grip_a, Vec2 grip_b,
               double dt) {
    return step_impl<false>(state, params, grip_a, grip_b, dt);
}

SilkState step_parallel(const SilkState& state, const SilkParams& params, Vec2 grip_a,
                        Vec2 grip_b, double dt) {
    return step_impl<true>(state, params, grip_a, grip_b, dt);
}

double peak_height(const SilkState& state) {
    return state.positions[peak_node(state)].z;
}

int peak_node(const SilkState& state) {
    const int n = state.node_count();
    int best = 1;
    for (int i = 2; i < n - 1; ++i) {
        if (state.positions[i].z > state.positions[best].z) best = i;
    }
    return best;
}

double tension_proxy(const SilkState& state, const SilkParams& params, Side side) {
    const int n = state.node_count();
    int i = (side == Side::A) ? 0 : n - 2;
    double len = (state.positions[i + 1] - state.positions[i]).norm();
    return std::abs(params.stiffness * (len - params.segment_rest_length));
}

std::optional<CrestEvent> detect_crest(const std::vector<HeightSample>& history,
                                       double rest_level, double noise_floor) {
    const auto n = history.size();
    if (n < 3) return std::nullopt;
    const HeightSample& a = history[n - 3];
    const HeightSample& b = history[n - 2];
    const HeightSample& c = history[n - 1];
    if (b.peak > a.peak && b.peak > c.peak && b.peak > rest_level + noise_floor) {
        return CrestEvent{b.time, b.node_index, b.peak};
    }
    return std::nullopt;
}

SilkParams randomize_params(const SilkParams& base, const RandomizationSpans& spans, Rng& rng) {
    auto check = [](double span, const char* field) {
        if (!(std::isfinite(span) && span >= 1.0))
            throw InvalidParameterError(std::string("randomization span must be >= 1: ") + field);
    };
    check(spans.total_mass, "total_mass");
    check(spans.damping, "damping");
    check(spans.air_drag, "air_drag");

    SilkParams out = base;
    out.total_mass = rng.log_uniform_scale(base.total_mass, spans.total_mass);
    out.damping = rng.log_uniform_scale(base.damping, spans.damping);
    out.air_drag = rng.log_uniform_scale(base.air_drag, spans.air_drag);
    return out;
}

double mechanical_energy(const SilkState& state, const SilkParams& params) {
    const int n = state.node_count();
    const double m = params.node_mass();
    double e = 0.0;
    for (int i = 0; i < n; ++i) e += 0.5 * m * state.velocities[i].norm2();
    for (int i = 0; i + 1 < n; ++i) {
        double stretch = (state.positions[i + 1] - state.positions[i]).norm() -
                         params.segment_rest_length;
        e += 0.5 * params.stiffness * stretch * stretch;
    }
    return e;
}

} // namespace silkstage::silk
