#include "silkstage/stage.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "silkstage/errors.hpp"

namespace silkstage::stage {

namespace {

// rng stream tags, so adding a consumer never shifts another's draws
constexpr std::uint64_t kCameraStream = 1;

} // namespace

Deriver::Deriver(const StageConfig& cfg, double h_floor, double h_sky)
    : cfg_(cfg), h_floor_(h_floor), h_sky_(h_sky), tracker_(cfg.sensing.record_window) {
    ledger_.record_award = cfg.scoring.record_award;
    ledger_.motion_rate = cfg.scoring.motion_rate;
}

DeriverOutputs Deriver::step(const DeriverInputs& in) {
    DeriverOutputs out;

    // rolling record; the very first sample just seeds it
    const bool vacuous = tracker_.empty();
    const auto upd = tracker_.update(in.time, in.peak_measured);
    out.record = tracker_.current_record();
    out.record_broken = upd.record_broken && !vacuous;

    // velocity history: long enough for both the classifier window and the
    // onset lookback
    hist_a_.push_back({in.time, in.va});
    hist_b_.push_back({in.time, in.vb});
    const std::size_t keep = static_cast<std::size_t>(std::lround(
        std::max(cfg_.sensing.window_seconds, cfg_.attribution_lookback) / cfg_.tick)) + 1;
    while (hist_a_.size() > keep) {
        hist_a_.pop_front();
        hist_b_.pop_front();
    }

    const std::size_t window = std::min(
        hist_a_.size(),
        static_cast<std::size_t>(std::lround(cfg_.sensing.window_seconds / cfg_.tick)));
    std::vector<double> va, vb;
    va.reserve(window);
    vb.reserve(window);
    for (std::size_t i = hist_a_.size() - window; i < hist_a_.size(); ++i) {
        va.push_back(hist_a_[i].vz);
        vb.push_back(hist_b_[i].vz);
    }
    out.estimate = sensing::classify_timing(va, vb, cfg_.tick, in.time, prev_, cfg_.sensing);
    prev_ = out.estimate;

    const auto cue = weather::cooperation_cue(out.estimate, cfg_.weather.lag_decay);
    out.cue = cue.value;

    // motion is paid for every tick; spends are read back as ledger deltas
    const double cost_a0 = ledger_.motion_cost_a, cost_b0 = ledger_.motion_cost_b;
    ledger_ = scoring::charge_motion(ledger_, scoring::Arm::A, in.speed_a, cfg_.tick);
    ledger_ = scoring::charge_motion(ledger_, scoring::Arm::B, in.speed_b, cfg_.tick);
    out.spend_a = ledger_.motion_cost_a - cost_a0;
    out.spend_b = ledger_.motion_cost_b - cost_b0;

    // a break only pays out when someone verifiably lifted
    if (out.record_broken) {
        const std::size_t back = std::min(
            hist_a_.size(),
            static_cast<std::size_t>(std::lround(cfg_.attribution_lookback / cfg_.tick)));
        std::deque<sensing::VelocitySample> wa(hist_a_.end() - back, hist_a_.end());
        std::deque<sensing::VelocitySample> wb(hist_b_.end() - back, hist_b_.end());
        const auto onset_a =
            sensing::lift_onset(wa, cfg_.sensing.onset_threshold, cfg_.sensing.onset_debounce);
        const auto onset_b =
            sensing::lift_onset(wb, cfg_.sensing.onset_threshold, cfg_.sensing.onset_debounce);
        if (onset_a || onset_b) {
            const auto mover = sensing::first_mover(onset_a, onset_b, cfg_.sensing.simultaneity);
            ledger_ = scoring::award_record(ledger_, mover);
            out.first_mover = mover;
        }
    }
    out.credit_a = ledger_.credit_a;
    out.credit_b = ledger_.credit_b;

    const bool safety_active = in.flag_a || in.flag_b || in.mode_a != arms::Mode::Active ||
                               in.mode_b != arms::Mode::Active;
    fsm_ = weather::step_preset(fsm_, cue, safety_active, cfg_.weather);
    out.preset = fsm_.current;

    const auto view = weather::forest_band(in.center_measured, h_floor_, h_sky_);
    out.band = view.band;
    out.scroll = view.scroll;
    return out;
}

namespace {

// Boundary command for one physics substep. Active trajectories are sampled
// exactly; everything else sweeps the silk edge linearly onto the arm's
// bookkept pose over the tick, so softening never kicks the cloth.
Vec2 grip_command(const arms::ArmState& arm, Vec2 bound0, double ts, double frac) {
    if (arm.mode == arms::Mode::Active && arm.active_trajectory)
        return arms::sample(*arm.active_trajectory, ts).grip;
    return {bound0.y + (arm.grip.y - bound0.y) * frac,
            bound0.z + (arm.grip.z - bound0.z) * frac};
}

// Bring an Active arm's bookkeeping to the end of the tick.
void sync_arm(arms::ArmState& arm, double t1) {
    if (arm.mode != arms::Mode::Active || !arm.active_trajectory) return;
    const auto s = arms::sample(*arm.active_trajectory, t1);
    arm.grip = s.grip;
    arm.grip_velocity = s.velocity;
    arm.grip_acceleration = s.acceleration;
    if (t1 >= arm.active_trajectory->end_time) arm.active_trajectory.reset();
}

} // namespace

Trace run_episode(const StageConfig& cfg, policy::Policy& policy_a, policy::Policy& policy_b) {
    validate(cfg);
    const double dt = cfg.tick / cfg.physics_substeps;
    const Vec2 home_a{-cfg.grip_y, cfg.grip_z};
    const Vec2 home_b{cfg.grip_y, cfg.grip_z};

    Trace trace;
    trace.header.config = cfg;
    trace.header.config_hash = config_hash(cfg);

    silk::SilkState state;
    try {
        state = silk::init_rest(cfg.silk, home_a, home_b);
    } catch (const NumericDivergenceError& e) {
        trace.error = e.what();
        return trace;
    }
    const int mid = state.node_count() / 2;
    trace.header.h_floor = state.positions[mid].z;
    trace.header.h_sky = cfg.grip_z + cfg.limits.stroke_max;
    trace.header.rest_peak = silk::peak_height(state);
    trace.header.policy_a = policy_a.name();
    trace.header.policy_b = policy_b.name();

    arms::ArmState arm_a, arm_b;
    arm_a.grip = home_a;
    arm_b.grip = home_b;
    std::optional<arms::MotionPrimitive> prim_a, prim_b;

    Rng camera(derive_seed(cfg.seed, kCameraStream));

    policy::ArmPose shared_a{arm_a.grip, arm_a.grip_velocity};
    policy::ArmPose shared_b{arm_b.grip, arm_b.grip_velocity};
    const long exchange_every =
        std::max(1L, std::lround(cfg.exchange_interval / cfg.tick));

    std::deque<std::pair<double, double>> height_hist;
    std::vector<silk::HeightSample> crest_hist;
    std::optional<silk::CrestEvent> last_crest;
    const double crest_floor = std::max(0.005, 3.0 * cfg.sensing.noise_std);

    Deriver deriver(cfg, trace.header.h_floor, trace.header.h_sky);

    const long ticks = std::lround(cfg.duration / cfg.tick);
    trace.records.reserve(static_cast<std::size_t>(ticks));

    for (long k = 0; k < ticks; ++k) {
        const double t0 = static_cast<double>(k) * cfg.tick;
        const double t1 = static_cast<double>(k + 1) * cfg.tick;

        // physics under the commands standing at tick entry
        const Vec2 bound_a0 = state.positions.front();
        const Vec2 bound_b0 = state.positions.back();
        try {
            for (int s = 1; s <= cfg.physics_substeps; ++s) {
                const double ts = t0 + s * dt;
                const double frac = static_cast<double>(s) / cfg.physics_substeps;
                state = silk::step(state, cfg.silk, grip_command(arm_a, bound_a0, ts, frac),
                                   grip_command(arm_b, bound_b0, ts, frac), dt);
            }
        } catch (const NumericDivergenceError& e) {
            trace.error = e.what();
            break;
        }

        sync_arm(arm_a, t1);
        sync_arm(arm_b, t1);
        if (!arm_a.active_trajectory) prim_a.reset();
        if (!arm_b.active_trajectory) prim_b.reset();

        // camera
        const auto meas = sensing::measure(state, cfg.sensing.noise_std, camera);
        height_hist.emplace_back(t1, meas.center_height);
        while (!height_hist.empty() &&
               height_hist.front().first < t1 - cfg.trend_window - cfg.tick)
            height_hist.pop_front();
        const double trend = policy::finite_trend(height_hist, cfg.trend_window);
        crest_hist.push_back({t1, meas.peak_height, meas.peak_node});
        if (crest_hist.size() > 3) crest_hist.erase(crest_hist.begin());
        if (const auto crest = silk::detect_crest(crest_hist, trace.header.rest_peak, crest_floor))
            last_crest = crest;

        const double tension_a = silk::tension_proxy(state, cfg.silk, silk::Side::A);
        const double tension_b = silk::tension_proxy(state, cfg.silk, silk::Side::B);

        // safety reflex: flags act on the arms this very tick
        const bool flag_a =
            tension_a > cfg.limits.tension_max ||
            arms::torque_proxy(arm_a, cfg.effective_mass, tension_a) > cfg.limits.torque_max;
        const bool flag_b =
            tension_b > cfg.limits.tension_max ||
            arms::torque_proxy(arm_b, cfg.effective_mass, tension_b) > cfg.limits.torque_max;
        arm_a = arms::safety_step(arm_a, flag_a, cfg.tick, t0, cfg.safety);
        arm_b = arms::safety_step(arm_b, flag_b, cfg.tick, t0, cfg.safety);

        // pose exchange on its own cadence
        if (k % exchange_every == 0) {
            shared_a = {arm_a.grip, arm_a.grip_velocity};
            shared_b = {arm_b.grip, arm_b.grip_velocity};
        }

        // idle arms consult their policies
        policy::WorldSnapshot snap;
        snap.time = t1;
        snap.height = meas.center_height;
        snap.height_trend = trend;
        if (last_crest) snap.last_crest_time = last_crest->time;
        snap.own_a = {arm_a.grip, arm_a.grip_velocity};
        snap.own_b = {arm_b.grip, arm_b.grip_velocity};
        snap.shared_a = shared_a;
        snap.shared_b = shared_b;
        snap.tension_a = tension_a;
        snap.tension_b = tension_b;

        if (arm_a.mode == arms::Mode::Active && !arm_a.active_trajectory) {
            const auto prim = policy_a.decide(policy::observe(snap, scoring::Arm::A));
            arm_a.active_trajectory =
                arms::render_primitive(prim, cfg.limits, last_crest, t1, arm_a.grip);
            prim_a = prim;
        }
        if (arm_b.mode == arms::Mode::Active && !arm_b.active_trajectory) {
            const auto prim = policy_b.decide(policy::observe(snap, scoring::Arm::B));
            arm_b.active_trajectory =
                arms::render_primitive(prim, cfg.limits, last_crest, t1, arm_b.grip);
            prim_b = prim;
        }

        // analysis + ledger
        DeriverInputs din;
        din.time = t1;
        din.peak_measured = meas.peak_height;
        din.center_measured = meas.center_height;
        din.va = arm_a.grip_velocity.z;
        din.vb = arm_b.grip_velocity.z;
        din.speed_a = arm_a.grip_velocity.norm();
        din.speed_b = arm_b.grip_velocity.norm();
        din.flag_a = flag_a;
        din.flag_b = flag_b;
        din.mode_a = arm_a.mode;
        din.mode_b = arm_b.mode;
        const auto dout = deriver.step(din);

        TraceRecord rec;
        rec.tick_index = k;
        rec.time = t1;
        rec.center_true = state.positions[mid].z;
        rec.center_measured = meas.center_height;
        rec.peak_true = silk::peak_height(state);
        rec.peak_measured = meas.peak_height;
        rec.record = dout.record;
        rec.record_broken = dout.record_broken;
        rec.first_mover = dout.first_mover;
        rec.lag = dout.estimate.lag;
        rec.correlation = dout.estimate.correlation;
        rec.relation = dout.estimate.relation;
        rec.cue = dout.cue;
        rec.preset = dout.preset;
        rec.band = dout.band;
        rec.scroll = dout.scroll;

        rec.arm_a.grip = arm_a.grip;
        rec.arm_a.velocity = arm_a.grip_velocity;
        rec.arm_a.mode = arm_a.mode;
        rec.arm_a.primitive_active = prim_a.has_value();
        if (prim_a) rec.arm_a.primitive = *prim_a;
        rec.arm_a.credit = dout.credit_a;
        rec.arm_a.spend = dout.spend_a;
        rec.arm_a.safety_flag = flag_a;
        rec.arm_a.tension = tension_a;

        rec.arm_b.grip = arm_b.grip;
        rec.arm_b.velocity = arm_b.grip_velocity;
        rec.arm_b.mode = arm_b.mode;
        rec.arm_b.primitive_active = prim_b.has_value();
        if (prim_b) rec.arm_b.primitive = *prim_b;
        rec.arm_b.credit = dout.credit_b;
        rec.arm_b.spend = dout.spend_b;
        rec.arm_b.safety_flag = flag_b;
        rec.arm_b.tension = tension_b;

        trace.records.push_back(rec);
    }
    return trace;
}

EpisodeSummary summarize(const Trace& trace) {
    EpisodeSummary s;
    s.ticks = static_cast<long>(trace.records.size());
    s.duration = static_cast<double>(s.ticks) * trace.header.config.tick;
    s.diverged = trace.error.has_value();
    bool prev_flag = false;
    for (const auto& r : trace.records) {
        s.max_peak = std::max(s.max_peak, r.peak_measured);
        if (r.first_mover) ++s.records;
        ++s.preset_ticks[static_cast<int>(r.preset)];
        ++s.relation_ticks[static_cast<int>(r.relation)];
        const bool flagged = r.arm_a.safety_flag || r.arm_b.safety_flag;
        if (flagged) ++s.flagged_ticks;
        if (flagged && !prev_flag) ++s.safety_events;
        prev_flag = flagged;
        s.credit_a = r.arm_a.credit;
        s.credit_b = r.arm_b.credit;
        s.spend_a += r.arm_a.spend;
        s.spend_b += r.arm_b.spend;
    }
    return s;
}

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string fmt(bool b) { return b ? "true" : "false"; }

std::string fmt(const std::optional<sensing::FirstMover>& m) {
    return m ? sensing::to_string(*m) : "none";
}

} // namespace

ReplayReport replay(const Trace& trace, const StageConfig& cfg) {
    if (config_hash(cfg) != trace.header.config_hash)
        throw IncompatibleTraceError("trace was produced under a different config");

    ReplayReport report;
    Deriver deriver(cfg, trace.header.h_floor, trace.header.h_sky);

    auto flag = [&report](long tick, const char* field, const std::string& want,
                          const std::string& got) {
        if (want != got) report.mismatches.push_back({tick, field, want, got});
    };

    for (const auto& r : trace.records) {
        DeriverInputs in;
        in.time = r.time;
        in.peak_measured = r.peak_measured;
        in.center_measured = r.center_measured;
        in.va = r.arm_a.velocity.z;
        in.vb = r.arm_b.velocity.z;
        in.speed_a = r.arm_a.velocity.norm();
        in.speed_b = r.arm_b.velocity.norm();
        in.flag_a = r.arm_a.safety_flag;
        in.flag_b = r.arm_b.safety_flag;
        in.mode_a = r.arm_a.mode;
        in.mode_b = r.arm_b.mode;
        const auto out = deriver.step(in);
        const long k = r.tick_index;

        flag(k, "record", fmt(out.record), fmt(r.record));
        flag(k, "record_broken", fmt(out.record_broken), fmt(r.record_broken));
        flag(k, "first_mover", fmt(out.first_mover), fmt(r.first_mover));
        flag(k, "lag", fmt(out.estimate.lag), fmt(r.lag));
        flag(k, "correlation", fmt(out.estimate.correlation), fmt(r.correlation));
        flag(k, "relation", sensing::to_string(out.estimate.relation),
             sensing::to_string(r.relation));
        flag(k, "cue", fmt(out.cue), fmt(r.cue));
        flag(k, "preset", weather::to_string(out.preset), weather::to_string(r.preset));
        flag(k, "band", weather::to_string(out.band), weather::to_string(r.band));
        flag(k, "scroll", fmt(out.scroll), fmt(r.scroll));
        flag(k, "credit_a", fmt(out.credit_a), fmt(r.arm_a.credit));
        flag(k, "credit_b", fmt(out.credit_b), fmt(r.arm_b.credit));
        flag(k, "spend_a", fmt(out.spend_a), fmt(r.arm_a.spend));
        flag(k, "spend_b", fmt(out.spend_b), fmt(r.arm_b.spend));
        ++report.ticks_checked;
    }
    return report;
}

} // namespace silkstage::stage
