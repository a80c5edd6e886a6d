#pragma once

#include "silkstage/sensing.hpp"

namespace silkstage::weather {

struct CooperationCue {
    double value = 0.0; // in [0,1]
    double time = 0.0;
};

struct WeatherConfig {
    double min_dwell = 2.0;  // s between non-safety transitions
    double margin = 0.05;    // hysteresis: boundary must be crossed by this much
    double lag_decay = 0.12; // s, cue = max(0,r) * exp(-|lag|/lag_decay)
    double band_clear = 0.75;
    double band_overcast = 0.5;
    double band_mist = 0.25;
};

// high when in step, gone on solo surges or anti-phase
CooperationCue cooperation_cue(const sensing::TimingEstimate& est, double lag_decay = 0.12);

enum class WeatherPreset { ClearSun, LightOvercast, MistThunder, LightningRain, BlueHush };

const char* to_string(WeatherPreset p);

struct WeatherFsm {
    WeatherPreset current = WeatherPreset::ClearSun;
    double since = 0.0; // time of the last transition
};

// Hysteretic preset selection. Safety reaches BlueHush on the same tick and
// holds it until safety_active clears; cue transitions need both the dwell
// and a margin-deep crossing of the band boundary.
WeatherFsm step_preset(const WeatherFsm& fsm, const CooperationCue& cue, bool safety_active,
                       const WeatherConfig& cfg = {});

// which band the cue falls in, ignoring hysteresis
WeatherPreset cue_band(double value, const WeatherConfig& cfg = {});

enum class ForestBand { Understory, Trunks, Canopy, OpenSky };

const char* to_string(ForestBand b);

struct ForestView {
    ForestBand band = ForestBand::Understory;
    double scroll = 0.0; // in [0,1]
};

// altimeter: scroll linearly with center height, band by quartile
ForestView forest_band(double center_height, double h_floor, double h_sky);

} // namespace silkstage::weather
