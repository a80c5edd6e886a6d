#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "silkstage/stage.hpp"

namespace silkstage::episodes {

enum class EpisodeLabel {
    ClearAscent,
    SuspendedNegotiation,
    CompetitiveWhiplash,
    RecoverySpiral,
    SafetyEclipse,
};

inline constexpr int kLabelCount = 5;

const char* to_string(EpisodeLabel label);

struct Evidence {
    std::string signal;
    double value = 0.0;
};

struct EpisodeSpan {
    EpisodeLabel label{};
    long start_tick = 0;
    long end_tick = 0; // inclusive
    std::vector<Evidence> evidence;
};

// The episode names are qualitative; these windows and thresholds pin them
// down and are meant to be tightened by hand.
struct DetectorConfig {
    double ascent_window = 3.0;     // s of InStep + ClearSun needed
    double ascent_rise = 0.05;      // m of measured peak rise inside that window
    double negotiation_window = 2.0;// s of SmallLag + LightOvercast
    double negotiation_trend = 0.02;// m/s ceiling on |height trend|
    double whiplash_window = 1.0;   // s pairing a Split with a stall-or-dip
    double recovery_window = 10.0;  // s to relock after a Split/GrowingLag
    double recovery_rise = 0.01;    // m of net center rise across the recovery
    double violation_window = 2.0;  // s of sustained contradiction to report
};

// detect() requires the trace to replay cleanly first.
struct InconsistentTraceError : std::runtime_error {
    stage::ReplayReport report;
    InconsistentTraceError(stage::ReplayReport rep, const std::string& what)
        : std::runtime_error(what), report(std::move(rep)) {}
};

// Rule-based scan for the five named episodes. Spans of one label never
// overlap; the list is ordered by start tick.
std::vector<EpisodeSpan> detect(const stage::Trace& trace, const DetectorConfig& cfg = {});

struct Violation {
    long start_tick = 0;
    long end_tick = 0; // inclusive
    std::string kind;  // "split-under-clear-sun" or "storm-during-harmony"
};

struct AlignmentReport {
    std::array<long, kLabelCount> counts{};
    std::array<double, kLabelCount> seconds{};
    std::vector<Violation> violations;
    std::string text;
};

// Per-label tallies plus the counterexample scan: sustained stretches where
// the sky contradicts the verified timing relation.
AlignmentReport alignment_report(const std::vector<EpisodeSpan>& spans,
                                 const stage::Trace& trace, const DetectorConfig& cfg = {});

// label,start_s,end_s,duration_s
std::string episodes_csv(const std::vector<EpisodeSpan>& spans, double tick);

} // namespace silkstage::episodes
