#include "silkstage/policy.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "silkstage/errors.hpp"

namespace silkstage::policy {

Observation observe(const WorldSnapshot& snap, scoring::Arm self) {
    const bool is_a = (self == scoring::Arm::A);
    const ArmPose& own = is_a ? snap.own_a : snap.own_b;
    const ArmPose& partner = is_a ? snap.shared_b : snap.shared_a;
    Observation obs;
    obs.height = snap.height;
    obs.height_trend = snap.height_trend;
    obs.own_grip = own.grip;
    obs.own_velocity = own.velocity;
    obs.tension = is_a ? snap.tension_a : snap.tension_b;
    obs.partner_grip = partner.grip;
    obs.partner_velocity = partner.velocity;
    obs.last_crest_age =
        snap.last_crest_time ? snap.time - *snap.last_crest_time : kNoCrest;
    return obs;
}

double finite_trend(const std::deque<std::pair<double, double>>& history,
                    double window) {
    if (history.size() < 2) return 0.0;
    const auto& [t1, h1] = history.back();
    // earliest sample still inside the window
    auto it = history.begin();
    while (it + 1 != history.end() && it->first < t1 - window) ++it;
    const auto& [t0, h0] = *it;
    if (t1 <= t0) return 0.0;
    return (h1 - h0) / (t1 - t0);
}

std::array<double, kFeatureCount> features(const Observation& obs,
                                           const FeatureScales& s) {
    return {
        1.0,
        obs.height / s.height,
        obs.height_trend / s.trend,
        obs.own_grip.z / s.grip,
        obs.own_velocity.z / s.velocity,
        obs.tension / s.tension,
        obs.partner_grip.z / s.grip,
        obs.partner_velocity.z / s.velocity,
        std::exp(-obs.last_crest_age / s.crest_decay),
    };
}

namespace {

double squash(double raw, const FieldBounds& b) {
    return b.lo + (b.hi - b.lo) * 0.5 * (std::tanh(raw) + 1.0);
}

} // namespace

arms::MotionPrimitive act(const PolicyParams& params, const Observation& obs) {
    if (params.weights.size() != static_cast<std::size_t>(kWeightCount))
        throw InvalidPolicyError("policy has " +
                                 std::to_string(params.weights.size()) +
                                 " weights, expected " +
                                 std::to_string(kWeightCount));
    for (double w : params.weights)
        if (!std::isfinite(w)) throw InvalidPolicyError("non-finite policy weight");

    const auto f = features(obs, params.scales);
    std::array<double, kActionCount> raw{};
    for (int j = 0; j < kActionCount; ++j) {
        double acc = 0.0;
        for (int i = 0; i < kFeatureCount; ++i)
            acc += params.weights[j * kFeatureCount + i] * f[i];
        raw[j] = acc;
    }
    arms::MotionPrimitive p;
    p.lift_amplitude = squash(raw[0], params.bounds.amplitude);
    p.snap_phase = squash(raw[1], params.bounds.snap_phase);
    p.dwell = squash(raw[2], params.bounds.dwell);
    return p;
}

arms::MotionPrimitive FrozenPolicy::decide(const Observation& obs) {
    return act(params_, obs);
}

namespace {

// The archetypes are phrased in primitive space so their intent stays
// readable: who waits for the wave, who fights it.

class CooperatorPolicy final : public Policy {
  public:
    arms::MotionPrimitive decide(const Observation&) override {
        return {0.25, 0.10, 0.25};
    }
    std::string name() const override { return "cooperator"; }
};

class RivalPolicy final : public Policy {
  public:
    arms::MotionPrimitive decide(const Observation& obs) override {
        // A surging partner gets an immediate counter snap with overshoot.
        if (std::abs(obs.partner_velocity.z) > 0.4) return {0.38, 0.0, 0.0};
        // Otherwise snap on a deliberately different beat per side.
        const double phase = obs.own_grip.y < 0.0 ? 0.08 : 0.50;
        return {0.34, phase, 0.12};
    }
    std::string name() const override { return "rival"; }
};

class JittererPolicy final : public Policy {
  public:
    explicit JittererPolicy(std::uint64_t seed)
        : rng_(derive_seed(seed, 0x6a69747465726572ull)) {}
    arms::MotionPrimitive decide(const Observation&) override {
        const double phase =
            std::clamp(0.10 + err_ * rng_.uniform(-1.0, 1.0), 0.0, 0.6);
        err_ = std::max(err_ * 0.82, 0.004);
        return {0.25, phase, 0.25};
    }
    std::string name() const override { return "jitterer"; }

  private:
    Rng rng_;
    double err_ = 0.18;
};

class StillPolicy final : public Policy {
  public:
    arms::MotionPrimitive decide(const Observation&) override {
        return {0.0, 0.0, 1.0};
    }
    std::string name() const override { return "still"; }
};

} // namespace

ScriptedKind parse_kind(const std::string& text) {
    std::string t;
    for (char c : text) t.push_back(static_cast<char>(std::tolower(c)));
    if (t == "cooperator") return ScriptedKind::Cooperator;
    if (t == "rival") return ScriptedKind::Rival;
    if (t == "jitterer") return ScriptedKind::Jitterer;
    if (t == "still") return ScriptedKind::Still;
    throw InvalidPolicyError("unknown scripted policy '" + text + "'");
}

std::string to_string(ScriptedKind kind) {
    switch (kind) {
        case ScriptedKind::Cooperator: return "cooperator";
        case ScriptedKind::Rival: return "rival";
        case ScriptedKind::Jitterer: return "jitterer";
        case ScriptedKind::Still: return "still";
    }
    return "?";
}

std::unique_ptr<Policy> make_scripted(ScriptedKind kind, std::uint64_t seed) {
    switch (kind) {
        case ScriptedKind::Cooperator: return std::make_unique<CooperatorPolicy>();
        case ScriptedKind::Rival: return std::make_unique<RivalPolicy>();
        case ScriptedKind::Jitterer: return std::make_unique<JittererPolicy>(seed);
        case ScriptedKind::Still: return std::make_unique<StillPolicy>();
    }
    throw InvalidPolicyError("unknown scripted policy kind");
}

namespace {
constexpr const char* kPolicyHeader = "silkstage-policy 1";
}

void save_policy(const std::string& path, const PolicyParams& params) {
    std::ofstream out(path);
    if (!out) throw InvalidPolicyError("cannot write policy file " + path);
    out << kPolicyHeader << "\n";
    char buf[64];
    for (double w : params.weights) {
        std::snprintf(buf, sizeof(buf), "%.17g", w);
        out << buf << "\n";
    }
    if (!out) throw InvalidPolicyError("write failed for policy file " + path);
}

PolicyParams load_policy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidPolicyError("cannot read policy file " + path);
    std::string line;
    if (!std::getline(in, line) || line != kPolicyHeader)
        throw InvalidPolicyError("bad policy header in " + path);
    PolicyParams params;
    params.weights.clear();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        double w = 0.0;
        char trailing = 0;
        if (!(ss >> w) || (ss >> trailing))
            throw InvalidPolicyError("bad weight line '" + line + "' in " + path);
        if (!std::isfinite(w))
            throw InvalidPolicyError("non-finite weight in " + path);
        params.weights.push_back(w);
    }
    if (params.weights.size() != static_cast<std::size_t>(kWeightCount))
        throw InvalidPolicyError(path + " holds " +
                                 std::to_string(params.weights.size()) +
                                 " weights, expected " +
                                 std::to_string(kWeightCount));
    return params;
}

} // namespace silkstage::policy
