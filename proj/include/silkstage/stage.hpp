#pragma once

#include <array>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "silkstage/config.hpp"
#include "silkstage/policy.hpp"

namespace silkstage::stage {

struct ArmTraceState {
    Vec2 grip{};
    Vec2 velocity{};
    arms::Mode mode = arms::Mode::Active;
    bool primitive_active = false;
    arms::MotionPrimitive primitive{}; // meaningful while primitive_active
    double credit = 0.0;               // ledger total after this tick
    double spend = 0.0;                // charged this tick
    bool safety_flag = false;
    double tension = 0.0;
};

// One control tick, everything Table-style analysis needs downstream.
struct TraceRecord {
    long tick_index = 0;
    double time = 0.0; // end of the tick
    double center_true = 0.0;
    double center_measured = 0.0;
    double peak_true = 0.0;
    double peak_measured = 0.0;
    double record = 0.0;
    bool record_broken = false;
    std::optional<sensing::FirstMover> first_mover; // set only when awarded
    double lag = 0.0;
    double correlation = 0.0;
    sensing::TimingRelation relation = sensing::TimingRelation::InStep;
    double cue = 0.0;
    weather::WeatherPreset preset = weather::WeatherPreset::ClearSun;
    weather::ForestBand band = weather::ForestBand::Understory;
    double scroll = 0.0;
    ArmTraceState arm_a, arm_b;
};

struct TraceHeader {
    std::uint64_t config_hash = 0;
    StageConfig config{};
    double h_floor = 0.0;  // rest sag of the silk center
    double h_sky = 0.0;    // grip height + max stroke
    double rest_peak = 0.0;
    std::string policy_a, policy_b;
};

struct Trace {
    TraceHeader header;
    std::vector<TraceRecord> records;
    std::optional<std::string> error; // set when the episode aborted
};

// Raw signals of one tick; everything else in a TraceRecord derives from
// these through the Deriver.
struct DeriverInputs {
    double time = 0.0;
    double peak_measured = 0.0;
    double center_measured = 0.0;
    double va = 0.0, vb = 0.0;           // grip z velocities
    double speed_a = 0.0, speed_b = 0.0; // |grip velocity|
    bool flag_a = false, flag_b = false;
    arms::Mode mode_a = arms::Mode::Active;
    arms::Mode mode_b = arms::Mode::Active;
};

struct DeriverOutputs {
    double record = 0.0;
    bool record_broken = false;
    std::optional<sensing::FirstMover> first_mover;
    sensing::TimingEstimate estimate{};
    double cue = 0.0;
    weather::WeatherPreset preset = weather::WeatherPreset::ClearSun;
    weather::ForestBand band = weather::ForestBand::Understory;
    double scroll = 0.0;
    double credit_a = 0.0, credit_b = 0.0;
    double spend_a = 0.0, spend_b = 0.0;
};

// The analysis half of the loop: records, timing, cue, weather, credits.
// The live episode, the replay verifier, and hand-built fixtures all run
// their signals through this one pipeline, so they can't drift apart.
class Deriver {
  public:
    Deriver(const StageConfig& cfg, double h_floor, double h_sky);

    DeriverOutputs step(const DeriverInputs& in);

    const scoring::CreditLedger& ledger() const { return ledger_; }

  private:
    StageConfig cfg_;
    double h_floor_, h_sky_;
    sensing::RecordTracker tracker_;
    std::deque<sensing::VelocitySample> hist_a_, hist_b_;
    std::optional<sensing::TimingEstimate> prev_;
    weather::WeatherFsm fsm_{};
    scoring::CreditLedger ledger_{};
};

// Closes the full per-tick loop; deterministic for a given config and
// policy pair. Numeric divergence ends the episode early with the partial
// trace kept and `error` set.
Trace run_episode(const StageConfig& cfg, policy::Policy& policy_a, policy::Policy& policy_b);

struct EpisodeSummary {
    long ticks = 0;
    double duration = 0.0;
    double max_peak = 0.0;     // measured
    int records = 0;           // awarded record events
    double credit_a = 0.0, credit_b = 0.0;
    double spend_a = 0.0, spend_b = 0.0;
    std::array<long, 5> preset_ticks{};   // by WeatherPreset order
    std::array<long, 4> relation_ticks{}; // by TimingRelation order
    int safety_events = 0;                // rising edges of any flag
    long flagged_ticks = 0;
    bool diverged = false;
};

EpisodeSummary summarize(const Trace& trace);

struct Mismatch {
    long tick = 0;
    std::string field;
    std::string expected;
    std::string found;
};

struct ReplayReport {
    long ticks_checked = 0;
    std::vector<Mismatch> mismatches;
    bool ok() const { return mismatches.empty(); }
};

// Re-derives every derived column from the logged raw signals and compares.
// Throws IncompatibleTraceError when cfg does not hash-match the trace.
ReplayReport replay(const Trace& trace, const StageConfig& cfg);

} // namespace silkstage::stage
