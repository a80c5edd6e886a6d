#include "silkstage/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "silkstage/errors.hpp"

namespace silkstage::stage {

using nlohmann::json;

namespace {

void req(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

bool fin(double x) { return std::isfinite(x); }

// Pulls known keys out of one section, complains about the rest by name.
class Section {
  public:
    Section(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        req(j_.is_object(), where_ + ": expected an object");
    }

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(where_ + "." + key + ": wrong type");
        }
    }

    void get_bounds(const char* key, policy::FieldBounds& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        const json& v = j_.at(key);
        req(v.is_array() && v.size() == 2, where_ + "." + key + ": expected [lo, hi]");
        try {
            out.lo = v.at(0).get<double>();
            out.hi = v.at(1).get<double>();
        } catch (const json::exception&) {
            throw ConfigError(where_ + "." + key + ": wrong type");
        }
    }

    // call after the gets; flags any leftover key by name
    void finish() const {
        for (const auto& item : j_.items())
            if (!seen_.count(item.key()))
                throw ConfigError(where_ + "." + item.key() + ": unknown field");
    }

  private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

json bounds_json(const policy::FieldBounds& b) { return json::array({b.lo, b.hi}); }

} // namespace

std::string to_json_text(const StageConfig& c) {
    json j;
    j["silk"] = {{"node_count", c.silk.node_count},
                 {"total_mass", c.silk.total_mass},
                 {"stiffness", c.silk.stiffness},
                 {"damping", c.silk.damping},
                 {"segment_rest_length", c.silk.segment_rest_length},
                 {"gravity", c.silk.gravity},
                 {"air_drag", c.silk.air_drag}};
    j["limits"] = {{"v_max", c.limits.v_max},
                   {"a_max", c.limits.a_max},
                   {"j_max", c.limits.j_max},
                   {"torque_max", c.limits.torque_max},
                   {"tension_max", c.limits.tension_max},
                   {"stroke_max", c.limits.stroke_max}};
    j["safety"] = {{"soften_tau", c.safety.soften_tau},
                   {"freeze_speed", c.safety.freeze_speed},
                   {"recover_time", c.safety.recover_time}};
    j["sensing"] = {{"noise_std", c.sensing.noise_std},
                    {"record_window", c.sensing.record_window},
                    {"onset_threshold", c.sensing.onset_threshold},
                    {"onset_debounce", c.sensing.onset_debounce},
                    {"simultaneity", c.sensing.simultaneity},
                    {"silent_rms", c.sensing.silent_rms},
                    {"window_seconds", c.sensing.window_seconds},
                    {"max_lag", c.sensing.max_lag},
                    {"in_step_lag", c.sensing.in_step_lag},
                    {"small_lag", c.sensing.small_lag},
                    {"split_lag", c.sensing.split_lag},
                    {"in_step_corr", c.sensing.in_step_corr},
                    {"growth_step", c.sensing.growth_step},
                    {"growth_streak_needed", c.sensing.growth_streak_needed}};
    j["scoring"] = {{"record_award", c.scoring.record_award},
                    {"motion_rate", c.scoring.motion_rate},
                    {"safety_penalty", c.scoring.safety_penalty}};
    j["weather"] = {{"min_dwell", c.weather.min_dwell},
                    {"margin", c.weather.margin},
                    {"lag_decay", c.weather.lag_decay},
                    {"band_clear", c.weather.band_clear},
                    {"band_overcast", c.weather.band_overcast},
                    {"band_mist", c.weather.band_mist}};
    j["action_bounds"] = {{"amplitude", bounds_json(c.action_bounds.amplitude)},
                          {"snap_phase", bounds_json(c.action_bounds.snap_phase)},
                          {"dwell", bounds_json(c.action_bounds.dwell)}};
    j["feature_scales"] = {{"height", c.feature_scales.height},
                           {"trend", c.feature_scales.trend},
                           {"grip", c.feature_scales.grip},
                           {"velocity", c.feature_scales.velocity},
                           {"tension", c.feature_scales.tension},
                           {"crest_decay", c.feature_scales.crest_decay}};
    j["stage"] = {{"tick", c.tick},
                  {"physics_substeps", c.physics_substeps},
                  {"exchange_interval", c.exchange_interval},
                  {"duration", c.duration},
                  {"seed", c.seed},
                  {"effective_mass", c.effective_mass},
                  {"trend_window", c.trend_window},
                  {"attribution_lookback", c.attribution_lookback},
                  {"grip_y", c.grip_y},
                  {"grip_z", c.grip_z},
                  {"share_policy", c.share_policy}};
    return j.dump(2) + "\n";
}

StageConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    req(j.is_object(), "config: expected a top-level object");

    StageConfig c;
    std::set<std::string> known = {"silk",    "limits",        "safety",
                                   "sensing", "scoring",       "weather",
                                   "action_bounds", "feature_scales", "stage"};
    for (const auto& item : j.items())
        if (!known.count(item.key()))
            throw ConfigError("config." + item.key() + ": unknown section");

    if (j.contains("silk")) {
        Section s(j["silk"], "silk");
        s.get("node_count", c.silk.node_count);
        s.get("total_mass", c.silk.total_mass);
        s.get("stiffness", c.silk.stiffness);
        s.get("damping", c.silk.damping);
        s.get("segment_rest_length", c.silk.segment_rest_length);
        s.get("gravity", c.silk.gravity);
        s.get("air_drag", c.silk.air_drag);
        s.finish();
    }
    if (j.contains("limits")) {
        Section s(j["limits"], "limits");
        s.get("v_max", c.limits.v_max);
        s.get("a_max", c.limits.a_max);
        s.get("j_max", c.limits.j_max);
        s.get("torque_max", c.limits.torque_max);
        s.get("tension_max", c.limits.tension_max);
        s.get("stroke_max", c.limits.stroke_max);
        s.finish();
    }
    if (j.contains("safety")) {
        Section s(j["safety"], "safety");
        s.get("soften_tau", c.safety.soften_tau);
        s.get("freeze_speed", c.safety.freeze_speed);
        s.get("recover_time", c.safety.recover_time);
        s.finish();
    }
    if (j.contains("sensing")) {
        Section s(j["sensing"], "sensing");
        s.get("noise_std", c.sensing.noise_std);
        s.get("record_window", c.sensing.record_window);
        s.get("onset_threshold", c.sensing.onset_threshold);
        s.get("onset_debounce", c.sensing.onset_debounce);
        s.get("simultaneity", c.sensing.simultaneity);
        s.get("silent_rms", c.sensing.silent_rms);
        s.get("window_seconds", c.sensing.window_seconds);
        s.get("max_lag", c.sensing.max_lag);
        s.get("in_step_lag", c.sensing.in_step_lag);
        s.get("small_lag", c.sensing.small_lag);
        s.get("split_lag", c.sensing.split_lag);
        s.get("in_step_corr", c.sensing.in_step_corr);
        s.get("growth_step", c.sensing.growth_step);
        s.get("growth_streak_needed", c.sensing.growth_streak_needed);
        s.finish();
    }
    if (j.contains("scoring")) {
        Section s(j["scoring"], "scoring");
        s.get("record_award", c.scoring.record_award);
        s.get("motion_rate", c.scoring.motion_rate);
        s.get("safety_penalty", c.scoring.safety_penalty);
        s.finish();
    }
    if (j.contains("weather")) {
        Section s(j["weather"], "weather");
        s.get("min_dwell", c.weather.min_dwell);
        s.get("margin", c.weather.margin);
        s.get("lag_decay", c.weather.lag_decay);
        s.get("band_clear", c.weather.band_clear);
        s.get("band_overcast", c.weather.band_overcast);
        s.get("band_mist", c.weather.band_mist);
        s.finish();
    }
    if (j.contains("action_bounds")) {
        Section s(j["action_bounds"], "action_bounds");
        s.get_bounds("amplitude", c.action_bounds.amplitude);
        s.get_bounds("snap_phase", c.action_bounds.snap_phase);
        s.get_bounds("dwell", c.action_bounds.dwell);
        s.finish();
    }
    if (j.contains("feature_scales")) {
        Section s(j["feature_scales"], "feature_scales");
        s.get("height", c.feature_scales.height);
        s.get("trend", c.feature_scales.trend);
        s.get("grip", c.feature_scales.grip);
        s.get("velocity", c.feature_scales.velocity);
        s.get("tension", c.feature_scales.tension);
        s.get("crest_decay", c.feature_scales.crest_decay);
        s.finish();
    }
    if (j.contains("stage")) {
        Section s(j["stage"], "stage");
        s.get("tick", c.tick);
        s.get("physics_substeps", c.physics_substeps);
        s.get("exchange_interval", c.exchange_interval);
        s.get("duration", c.duration);
        s.get("seed", c.seed);
        s.get("effective_mass", c.effective_mass);
        s.get("trend_window", c.trend_window);
        s.get("attribution_lookback", c.attribution_lookback);
        s.get("grip_y", c.grip_y);
        s.get("grip_z", c.grip_z);
        s.get("share_policy", c.share_policy);
        s.finish();
    }
    return c;
}

void validate(const StageConfig& c) {
    try {
        silk::validate(c.silk);
    } catch (const InvalidParameterError& e) {
        throw ConfigError(std::string("silk: ") + e.what());
    }
    try {
        arms::validate(c.limits);
    } catch (const InvalidParameterError& e) {
        throw ConfigError(std::string("limits: ") + e.what());
    }
    req(fin(c.safety.soften_tau) && c.safety.soften_tau > 0, "safety.soften_tau: must be positive");
    req(fin(c.safety.freeze_speed) && c.safety.freeze_speed > 0,
        "safety.freeze_speed: must be positive");
    req(fin(c.safety.recover_time) && c.safety.recover_time >= 0,
        "safety.recover_time: must be non-negative");

    const auto& sn = c.sensing;
    req(fin(sn.noise_std) && sn.noise_std >= 0, "sensing.noise_std: must be non-negative");
    req(fin(sn.record_window) && sn.record_window > 0, "sensing.record_window: must be positive");
    req(fin(sn.onset_threshold) && sn.onset_threshold > 0,
        "sensing.onset_threshold: must be positive");
    req(sn.onset_debounce >= 1, "sensing.onset_debounce: must be at least 1");
    req(fin(sn.simultaneity) && sn.simultaneity >= 0, "sensing.simultaneity: must be non-negative");
    req(fin(sn.silent_rms) && sn.silent_rms >= 0, "sensing.silent_rms: must be non-negative");
    req(fin(sn.window_seconds) && sn.window_seconds > 0,
        "sensing.window_seconds: must be positive");
    req(fin(sn.max_lag) && sn.max_lag > 0, "sensing.max_lag: must be positive");
    req(fin(sn.in_step_lag) && sn.in_step_lag > 0, "sensing.in_step_lag: must be positive");
    req(sn.in_step_lag <= sn.small_lag && sn.small_lag <= sn.split_lag,
        "sensing: lag thresholds must be ordered in_step <= small <= split");
    req(fin(sn.in_step_corr) && sn.in_step_corr > 0 && sn.in_step_corr <= 1,
        "sensing.in_step_corr: must be in (0,1]");
    req(fin(sn.growth_step) && sn.growth_step > 0, "sensing.growth_step: must be positive");
    req(sn.growth_streak_needed >= 1, "sensing.growth_streak_needed: must be at least 1");

    req(fin(c.scoring.record_award) && c.scoring.record_award >= 0,
        "scoring.record_award: must be non-negative");
    req(fin(c.scoring.motion_rate) && c.scoring.motion_rate >= 0,
        "scoring.motion_rate: must be non-negative");
    req(fin(c.scoring.safety_penalty) && c.scoring.safety_penalty >= 0,
        "scoring.safety_penalty: must be non-negative");

    const auto& w = c.weather;
    req(fin(w.min_dwell) && w.min_dwell >= 0, "weather.min_dwell: must be non-negative");
    req(fin(w.margin) && w.margin >= 0, "weather.margin: must be non-negative");
    req(fin(w.lag_decay) && w.lag_decay > 0, "weather.lag_decay: must be positive");
    req(fin(w.band_mist) && fin(w.band_overcast) && fin(w.band_clear) && 0 < w.band_mist &&
            w.band_mist < w.band_overcast && w.band_overcast < w.band_clear && w.band_clear < 1,
        "weather: bands must satisfy 0 < mist < overcast < clear < 1");

    auto check_bounds = [](const policy::FieldBounds& b, const char* name) {
        req(fin(b.lo) && fin(b.hi) && b.lo >= 0 && b.lo <= b.hi,
            std::string("action_bounds.") + name + ": need 0 <= lo <= hi");
    };
    check_bounds(c.action_bounds.amplitude, "amplitude");
    check_bounds(c.action_bounds.snap_phase, "snap_phase");
    check_bounds(c.action_bounds.dwell, "dwell");

    const auto& fs = c.feature_scales;
    req(fin(fs.height) && fs.height > 0 && fin(fs.trend) && fs.trend > 0 && fin(fs.grip) &&
            fs.grip > 0 && fin(fs.velocity) && fs.velocity > 0 && fin(fs.tension) &&
            fs.tension > 0 && fin(fs.crest_decay) && fs.crest_decay > 0,
        "feature_scales: all scales must be positive");

    req(fin(c.tick) && c.tick > 0, "stage.tick: must be positive");
    req(c.physics_substeps >= 1, "stage.physics_substeps: must be at least 1");
    req(c.tick / c.physics_substeps <= 0.01 + 1e-12,
        "stage: tick/physics_substeps must give a physics step of at most 0.01 s");
    req(fin(c.exchange_interval) && c.exchange_interval >= c.tick,
        "stage.exchange_interval: must be at least one tick");
    req(fin(c.duration) && c.duration >= 0, "stage.duration: must be non-negative");
    req(fin(c.effective_mass) && c.effective_mass > 0, "stage.effective_mass: must be positive");
    req(fin(c.trend_window) && c.trend_window > 0, "stage.trend_window: must be positive");
    req(fin(c.attribution_lookback) && c.attribution_lookback > 0,
        "stage.attribution_lookback: must be positive");
    req(fin(c.grip_y) && c.grip_y > 0, "stage.grip_y: must be positive");
    req(fin(c.grip_z) && c.grip_z > 0, "stage.grip_z: must be positive");
}

std::uint64_t config_hash(const StageConfig& cfg) {
    const std::string text = to_json_text(cfg);
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char b : text) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h;
}

StageConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    StageConfig cfg = config_from_json_text(buf.str());
    validate(cfg);
    return cfg;
}

void save_config(const std::string& path, const StageConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config file " + path);
    out << to_json_text(cfg);
}

} // namespace silkstage::stage
