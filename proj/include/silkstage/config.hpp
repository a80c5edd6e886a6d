#pragma once

#include <cstdint>
#include <string>

#include "silkstage/arms.hpp"
#include "silkstage/policy.hpp"
#include "silkstage/scoring.hpp"
#include "silkstage/sensing.hpp"
#include "silkstage/silk.hpp"
#include "silkstage/weather.hpp"

namespace silkstage::stage {

// Everything one episode depends on. Serialized whole into the trace header,
// hashed for replay compatibility.
struct StageConfig {
    silk::SilkParams silk{};
    arms::ArmLimits limits{};
    arms::SafetyConfig safety{};
    sensing::SensingConfig sensing{};
    scoring::ScoringConfig scoring{};
    weather::WeatherConfig weather{};
    policy::ActionBounds action_bounds{};
    policy::FeatureScales feature_scales{};

    double tick = 0.02;             // control period
    int physics_substeps = 10;      // silk steps per control tick
    double exchange_interval = 0.1; // pose exchange cadence
    double duration = 60.0;
    std::uint64_t seed = 1;
    double effective_mass = 0.5;    // kg, torque proxy
    double trend_window = 0.2;      // s, height trend finite difference
    double attribution_lookback = 3.0; // s of velocity history scanned for onsets
    double grip_y = 0.6;            // arms sit at y = -grip_y and +grip_y
    double grip_z = 1.0;            // baseline grip height
    bool share_policy = false;      // trainer: one parameter set for both arms
};

// Throws ConfigError with a field-qualified message.
void validate(const StageConfig& cfg);

std::string to_json_text(const StageConfig& cfg);
StageConfig config_from_json_text(const std::string& text);

// FNV-1a over the canonical serialization of the effective config.
std::uint64_t config_hash(const StageConfig& cfg);

StageConfig load_config(const std::string& path);
void save_config(const std::string& path, const StageConfig& cfg);

} // namespace silkstage::stage
