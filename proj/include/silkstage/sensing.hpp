#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "silkstage/rng.hpp"
#include "silkstage/silk.hpp"

namespace silkstage::sensing {

struct SensingConfig {
    double noise_std = 0.002;      // m, camera noise
    double record_window = 180.0;  // s
    double onset_threshold = 0.05; // m/s edge velocity
    int onset_debounce = 3;        // ticks the velocity must persist
    double simultaneity = 0.1;     // s, shared-credit window
    double silent_rms = 0.01;      // m/s, both below = resting together
    double window_seconds = 1.0;   // classifier history length
    double max_lag = 0.5;          // s, search range
    double in_step_lag = 0.06;     // s
    double small_lag = 0.12;       // s
    double split_lag = 0.25;       // s
    double in_step_corr = 0.6;
    double growth_step = 0.02;     // s of |lag| increase that counts as growth
    int growth_streak_needed = 3;
};

struct HeightMeasurement {
    double time = 0.0;
    double center_height = 0.0;
    double peak_height = 0.0;
    int peak_node = 0; // true argmax node; the camera resolves position well
};

// center = middle node + noise, peak = interior max + independent noise
HeightMeasurement measure(const silk::SilkState& state, double noise_std, Rng& rng);

// Rolling-window maximum of measured peak height. O(1) amortized per update
// via a monotonic deque.
class RecordTracker {
public:
    explicit RecordTracker(double window = 180.0) : window_(window) {}

    struct Update {
        bool record_broken = false;
        double margin = 0.0; // new peak minus the record it beat (0 if vacuous)
    };

    // Evicts samples older than the window, then compares strictly.
    // Throws OutOfOrderError on non-monotone time.
    Update update(double time, double peak);

    double current_record() const { return deque_.empty() ? 0.0 : deque_.front().peak; }
    double record_time() const { return deque_.empty() ? 0.0 : deque_.front().time; }
    bool empty() const { return deque_.empty(); }
    double window() const { return window_; }

private:
    struct Sample {
        double time;
        double peak;
    };
    double window_;
    double last_time_ = -1e300;
    std::deque<Sample> deque_; // peaks non-increasing front to back
};

struct VelocitySample {
    double time = 0.0;
    double vz = 0.0;
};

// Earliest time the edge velocity rises above threshold and stays there for
// debounce ticks; single-tick spikes don't count.
std::optional<double> lift_onset(const std::deque<VelocitySample>& series, double threshold,
                                 int debounce = 3);

enum class FirstMover { ArmA, ArmB, Shared };

const char* to_string(FirstMover m);

// Earlier onset wins; near-simultaneous starts share. Throws
// AttributionImpossibleError when neither arm shows an onset.
FirstMover first_mover(std::optional<double> onset_a, std::optional<double> onset_b,
                       double simultaneity = 0.1);

enum class TimingRelation { InStep, SmallLag, GrowingLag, Split };

const char* to_string(TimingRelation r);

struct TimingEstimate {
    TimingRelation relation = TimingRelation::InStep;
    double lag = 0.0;         // s, positive = B trails A
    double correlation = 1.0; // r at the chosen lag
    double time = 0.0;
    int growth_streak = 0; // consecutive estimates with |lag| growing
};

// Normalized cross-correlation over a +-max_lag grid of control ticks. The
// chosen lag maximizes |r| (ties: smaller |lag|, then positive); correlation
// keeps its sign so anti-phase reads as negative.
TimingEstimate classify_timing(const std::vector<double>& va, const std::vector<double>& vb,
                               double tick, double now,
                               const std::optional<TimingEstimate>& prev,
                               const SensingConfig& cfg = {});

} // namespace silkstage::sensing
