#include <cmath>
#include <cstdio>
#include <deque>
#include <string>
#include <utility>

#include "doctest.h"
#include "silkstage/errors.hpp"
#include "silkstage/policy.hpp"
#include "silkstage/rng.hpp"

using namespace silkstage;
using namespace silkstage::policy;

namespace {

WorldSnapshot sample_snapshot() {
    WorldSnapshot s;
    s.time = 3.5;
    s.height = 0.9;
    s.height_trend = 0.05;
    s.last_crest_time = 2.0;
    s.own_a = {{-0.65, 1.0}, {0.0, 0.3}};
    s.own_b = {{0.65, 1.1}, {0.0, -0.2}};
    s.shared_a = {{-0.65, 0.95}, {0.0, 0.1}};
    s.shared_b = {{0.65, 1.05}, {0.0, -0.1}};
    s.tension_a = 1.2;
    s.tension_b = 0.8;
    return s;
}

} // namespace

TEST_CASE("observation routes own truth and partner staleness") {
    auto snap = sample_snapshot();
    auto a = observe(snap, scoring::Arm::A);
    CHECK(a.height == 0.9);
    CHECK(a.height_trend == 0.05);
    CHECK(a.own_grip == snap.own_a.grip);
    CHECK(a.own_velocity == snap.own_a.velocity);
    CHECK(a.tension == 1.2);
    // partner comes off the exchange bus, not the live pose
    CHECK(a.partner_grip == snap.shared_b.grip);
    CHECK(a.partner_velocity == snap.shared_b.velocity);
    CHECK(a.last_crest_age == doctest::Approx(1.5));

    auto b = observe(snap, scoring::Arm::B);
    CHECK(b.own_grip == snap.own_b.grip);
    CHECK(b.tension == 0.8);
    CHECK(b.partner_grip == snap.shared_a.grip);
}

TEST_CASE("live partner motion is invisible until exchanged") {
    auto snap = sample_snapshot();
    auto before = observe(snap, scoring::Arm::A);
    // partner lurches after the last exchange
    snap.own_b.grip.z += 0.1;
    snap.own_b.velocity.z = 9.0;
    auto after = observe(snap, scoring::Arm::A);
    CHECK(after.partner_grip == before.partner_grip);
    CHECK(after.partner_velocity == before.partner_velocity);

    PolicyParams params;
    Rng rng(5);
    for (auto& w : params.weights) w = rng.normal();
    auto p0 = act(params, before);
    auto p1 = act(params, after);
    CHECK(p0.lift_amplitude == p1.lift_amplitude);
    CHECK(p0.snap_phase == p1.snap_phase);
    CHECK(p0.dwell == p1.dwell);
}

TEST_CASE("no crest yet reads as a stale sentinel") {
    auto snap = sample_snapshot();
    snap.last_crest_time.reset();
    CHECK(observe(snap, scoring::Arm::A).last_crest_age == kNoCrest);
}

TEST_CASE("height trend finite difference") {
    std::deque<std::pair<double, double>> hist;
    CHECK(finite_trend(hist, 0.2) == 0.0);
    hist.push_back({0.0, 1.0});
    CHECK(finite_trend(hist, 0.2) == 0.0);
    for (int k = 1; k <= 50; ++k) hist.push_back({0.02 * k, 1.0 + 0.1 * 0.02 * k});
    CHECK(finite_trend(hist, 0.2) == doctest::Approx(0.1).epsilon(1e-9));

    // only the trailing window counts: flat for 1 s, then rising
    std::deque<std::pair<double, double>> bent;
    for (int k = 0; k <= 50; ++k) bent.push_back({0.02 * k, 1.0});
    for (int k = 51; k <= 100; ++k)
        bent.push_back({0.02 * k, 1.0 + 0.1 * 0.02 * (k - 50)});
    CHECK(finite_trend(bent, 0.2) == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("feature vector shape") {
    Observation obs; // all zeros, no crest
    FeatureScales s;
    auto f = features(obs, s);
    CHECK(f[0] == 1.0);
    for (int i = 1; i < 8; ++i) CHECK(f[i] == 0.0);
    CHECK(f[8] == 0.0); // crest feature underflows at the sentinel

    obs.last_crest_age = 0.0;
    CHECK(features(obs, s)[8] == 1.0);
    obs.tension = 3.0;
    CHECK(features(obs, s)[5] == doctest::Approx(0.5));
}

TEST_CASE("zero weights decode to mid-bound primitives") {
    PolicyParams params;
    auto p = act(params, Observation{});
    CHECK(p.lift_amplitude == doctest::Approx(0.2));
    CHECK(p.snap_phase == doctest::Approx(0.3));
    CHECK(p.dwell == doctest::Approx(0.75));
}

TEST_CASE("act is a pure function") {
    PolicyParams params;
    Rng rng(11);
    for (auto& w : params.weights) w = rng.normal();
    auto snap = sample_snapshot();
    auto obs = observe(snap, scoring::Arm::B);
    auto p0 = act(params, obs);
    auto p1 = act(params, obs);
    CHECK(p0.lift_amplitude == p1.lift_amplitude);
    CHECK(p0.snap_phase == p1.snap_phase);
    CHECK(p0.dwell == p1.dwell);
}

TEST_CASE("decoded primitives stay inside the action box") {
    Rng rng(23);
    PolicyParams params;
    for (int trial = 0; trial < 1000; ++trial) {
        for (auto& w : params.weights) w = 3.0 * rng.normal();
        Observation obs;
        obs.height = rng.uniform(-50.0, 50.0);
        obs.height_trend = rng.uniform(-50.0, 50.0);
        obs.own_grip = {rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)};
        obs.own_velocity = {rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0)};
        obs.tension = rng.uniform(0.0, 100.0);
        obs.partner_grip = {rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)};
        obs.partner_velocity = {rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0)};
        obs.last_crest_age = rng.uniform(0.0, kNoCrest);
        auto p = act(params, obs);
        CHECK(p.lift_amplitude >= params.bounds.amplitude.lo);
        CHECK(p.lift_amplitude <= params.bounds.amplitude.hi);
        CHECK(p.snap_phase >= params.bounds.snap_phase.lo);
        CHECK(p.snap_phase <= params.bounds.snap_phase.hi);
        CHECK(p.dwell >= params.bounds.dwell.lo);
        CHECK(p.dwell <= params.bounds.dwell.hi);
    }
}

TEST_CASE("decode responds continuously to weight perturbations") {
    Observation obs; // bias feature alone is live
    double prev = 1.0;
    for (double eps : {1e-2, 1e-4, 1e-6}) {
        PolicyParams params;
        params.weights[0] = eps; // bias → amplitude
        double delta = std::abs(act(params, obs).lift_amplitude - 0.2);
        CHECK(delta <= 0.2 * eps + 1e-15); // |tanh x| ≤ |x|
        CHECK(delta < prev);
        prev = delta;
    }
}

TEST_CASE("broken weights are rejected") {
    PolicyParams params;
    params.weights[13] = std::nan("");
    CHECK_THROWS_AS(act(params, Observation{}), InvalidPolicyError);
    params.weights[13] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(act(params, Observation{}), InvalidPolicyError);
    PolicyParams off;
    off.weights.resize(11);
    CHECK_THROWS_AS(act(off, Observation{}), InvalidPolicyError);
}

TEST_CASE("a collapsed amplitude bound pins lifts at exactly zero") {
    PolicyParams params;
    params.bounds.amplitude = {0.0, 0.0};
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        for (auto& w : params.weights) w = 5.0 * rng.normal();
        auto snap = sample_snapshot();
        auto p = act(params, observe(snap, scoring::Arm::A));
        CHECK(p.lift_amplitude == 0.0);
    }
}

TEST_CASE("policy files round-trip exactly") {
    PolicyParams params;
    Rng rng(31);
    for (auto& w : params.weights) w = rng.normal() * 1e3;
    params.weights[0] = 1.0 / 3.0;
    params.weights[1] = 1e-300;
    params.weights[2] = -0.0;
    const std::string path = "policy_roundtrip.txt";
    save_policy(path, params);
    auto loaded = load_policy(path);
    REQUIRE(loaded.weights.size() == params.weights.size());
    for (int i = 0; i < kWeightCount; ++i) CHECK(loaded.weights[i] == params.weights[i]);
    std::remove(path.c_str());
}

TEST_CASE("malformed policy files are refused") {
    CHECK_THROWS_AS(load_policy("does_not_exist.policy"), InvalidPolicyError);

    const std::string path = "policy_bad.txt";
    {
        std::FILE* f = std::fopen(path.c_str(), "w");
        std::fputs("some-other-format 9\n1.0\n", f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(load_policy(path), InvalidPolicyError);
    {
        std::FILE* f = std::fopen(path.c_str(), "w");
        std::fputs("silkstage-policy 1\n1.0\n2.0\n", f); // too few weights
        std::fclose(f);
    }
    CHECK_THROWS_AS(load_policy(path), InvalidPolicyError);
    {
        std::FILE* f = std::fopen(path.c_str(), "w");
        std::fputs("silkstage-policy 1\n", f);
        for (int i = 0; i < kWeightCount - 1; ++i) std::fputs("0.5\n", f);
        std::fputs("banana\n", f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(load_policy(path), InvalidPolicyError);
    std::remove(path.c_str());
}

TEST_CASE("scripted kinds parse and print") {
    CHECK(parse_kind("cooperator") == ScriptedKind::Cooperator);
    CHECK(parse_kind("Rival") == ScriptedKind::Rival);
    CHECK(parse_kind("JITTERER") == ScriptedKind::Jitterer);
    CHECK(parse_kind("still") == ScriptedKind::Still);
    CHECK_THROWS_AS(parse_kind("saboteur"), InvalidPolicyError);
    for (auto k : {ScriptedKind::Cooperator, ScriptedKind::Rival,
                   ScriptedKind::Jitterer, ScriptedKind::Still})
        CHECK(parse_kind(to_string(k)) == k);
}

TEST_CASE("cooperator and still are constant") {
    auto coop = make_scripted(ScriptedKind::Cooperator);
    auto snap = sample_snapshot();
    auto p = coop->decide(observe(snap, scoring::Arm::A));
    CHECK(p.lift_amplitude == 0.25);
    CHECK(p.snap_phase == 0.10);
    auto still = make_scripted(ScriptedKind::Still);
    CHECK(still->decide(observe(snap, scoring::Arm::B)).lift_amplitude == 0.0);
}

TEST_CASE("rival picks a different beat per side and counters surges") {
    auto rival = make_scripted(ScriptedKind::Rival);
    auto snap = sample_snapshot();
    snap.shared_b.velocity.z = 0.0;
    snap.shared_a.velocity.z = 0.0;
    auto left = rival->decide(observe(snap, scoring::Arm::A));
    auto right = rival->decide(observe(snap, scoring::Arm::B));
    CHECK(left.snap_phase != right.snap_phase);
    // partner surge triggers the counter snap
    snap.shared_b.velocity.z = 1.0;
    auto counter = rival->decide(observe(snap, scoring::Arm::A));
    CHECK(counter.dwell == 0.0);
    CHECK(counter.lift_amplitude > left.lift_amplitude);
}

TEST_CASE("jitterer is seeded and settles down") {
    auto snap = sample_snapshot();
    auto obs = observe(snap, scoring::Arm::A);

    auto j1 = make_scripted(ScriptedKind::Jitterer, 99);
    auto j2 = make_scripted(ScriptedKind::Jitterer, 99);
    auto j3 = make_scripted(ScriptedKind::Jitterer, 100);
    bool diverged = false;
    double early = 0.0, late = 0.0;
    for (int k = 0; k < 40; ++k) {
        auto p1 = j1->decide(obs);
        auto p2 = j2->decide(obs);
        CHECK(p1.snap_phase == p2.snap_phase);
        if (p1.snap_phase != j3->decide(obs).snap_phase) diverged = true;
        double dev = std::abs(p1.snap_phase - 0.10);
        if (k < 10) early = std::max(early, dev);
        if (k >= 30) late = std::max(late, dev);
    }
    CHECK(diverged);
    CHECK(early > 0.02);
    CHECK(late <= 0.004 + 1e-12);
    CHECK(late < early);
}

TEST_CASE("frozen policy defers to its parameters") {
    PolicyParams params;
    params.weights[9] = 0.7; // bias → snap phase
    FrozenPolicy frozen(params);
    auto snap = sample_snapshot();
    auto obs = observe(snap, scoring::Arm::B);
    auto direct = act(params, obs);
    auto via = frozen.decide(obs);
    CHECK(via.snap_phase == direct.snap_phase);
    CHECK(frozen.name() == "frozen");
}
