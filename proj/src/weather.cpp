#include "silkstage/weather.hpp"

#include <algorithm>
#include <cmath>

#include "silkstage/errors.hpp"

namespace silkstage::weather {

CooperationCue cooperation_cue(const sensing::TimingEstimate& est, double lag_decay) {
    CooperationCue cue;
    cue.time = est.time;
    double r = std::max(0.0, est.correlation);
    cue.value = std::clamp(r * std::exp(-std::abs(est.lag) / lag_decay), 0.0, 1.0);
    return cue;
}

const char* to_string(WeatherPreset p) {
    switch (p) {
    case WeatherPreset::ClearSun: return "ClearSun";
    case WeatherPreset::LightOvercast: return "LightOvercast";
    case WeatherPreset::MistThunder: return "MistThunder";
    case WeatherPreset::LightningRain: return "LightningRain";
    case WeatherPreset::BlueHush: return "BlueHush";
    }
    return "?";
}

WeatherPreset cue_band(double value, const WeatherConfig& cfg) {
    if (value >= cfg.band_clear) return WeatherPreset::ClearSun;
    if (value >= cfg.band_overcast) return WeatherPreset::LightOvercast;
    if (value >= cfg.band_mist) return WeatherPreset::MistThunder;
    return WeatherPreset::LightningRain;
}

namespace {

int rank(WeatherPreset p) {
    switch (p) {
    case WeatherPreset::LightningRain: return 0;
    case WeatherPreset::MistThunder: return 1;
    case WeatherPreset::LightOvercast: return 2;
    case WeatherPreset::ClearSun: return 3;
    case WeatherPreset::BlueHush: return -1;
    }
    return -1;
}

// boundary that must be crossed first when moving away from `p`
double upper_edge(WeatherPreset p, const WeatherConfig& cfg) {
    switch (rank(p)) {
    case 0: return cfg.band_mist;
    case 1: return cfg.band_overcast;
    case 2: return cfg.band_clear;
    default: return 1e300;
    }
}

double lower_edge(WeatherPreset p, const WeatherConfig& cfg) {
    switch (rank(p)) {
    case 3: return cfg.band_clear;
    case 2: return cfg.band_overcast;
    case 1: return cfg.band_mist;
    default: return -1e300;
    }
}

} // namespace

WeatherFsm step_preset(const WeatherFsm& fsm, const CooperationCue& cue, bool safety_active,
                       const WeatherConfig& cfg) {
    WeatherFsm out = fsm;
    if (safety_active) {
        if (fsm.current != WeatherPreset::BlueHush) {
            out.current = WeatherPreset::BlueHush;
            out.since = cue.time;
        }
        return out;
    }
    if (fsm.current == WeatherPreset::BlueHush) {
        // the caller keeps safety_active up through arm recovery, so reaching
        // here means the hush is over; re-enter by band, dwell-exempt
        out.current = cue_band(cue.value, cfg);
        out.since = cue.time;
        return out;
    }

    WeatherPreset target = cue_band(cue.value, cfg);
    if (target == fsm.current) return out;
    if (cue.time - fsm.since < cfg.min_dwell) return out;

    bool deep_enough;
    if (rank(target) > rank(fsm.current)) {
        deep_enough = cue.value >= upper_edge(fsm.current, cfg) + cfg.margin;
    } else {
        deep_enough = cue.value <= lower_edge(fsm.current, cfg) - cfg.margin;
    }
    if (deep_enough) {
        out.current = target;
        out.since = cue.time;
    }
    return out;
}

const char* to_string(ForestBand b) {
    switch (b) {
    case ForestBand::Understory: return "Understory";
    case ForestBand::Trunks: return "Trunks";
    case ForestBand::Canopy: return "Canopy";
    case ForestBand::OpenSky: return "OpenSky";
    }
    return "?";
}

ForestView forest_band(double center_height, double h_floor, double h_sky) {
    if (!(h_sky > h_floor)) throw InvalidParameterError("h_sky must exceed h_floor");
    ForestView v;
    v.scroll = std::clamp((center_height - h_floor) / (h_sky - h_floor), 0.0, 1.0);
    if (v.scroll < 0.25) v.band = ForestBand::Understory;
    else if (v.scroll < 0.5) v.band = ForestBand::Trunks;
    else if (v.scroll < 0.75) v.band = ForestBand::Canopy;
    else v.band = ForestBand::OpenSky;
    return v;
}

} // namespace silkstage::weather
