#include "silkstage/trace_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "silkstage/errors.hpp"

namespace silkstage::stage {

namespace {

// insertion order preserved -> stable, human-scannable columns
using ojson = nlohmann::ordered_json;

constexpr const char* kFormat = "silkstage-trace";
constexpr int kVersion = 1;

ojson arm_json(const ArmTraceState& a) {
    ojson j;
    j["grip"] = {a.grip.y, a.grip.z};
    j["vel"] = {a.velocity.y, a.velocity.z};
    j["mode"] = arms::to_string(a.mode);
    if (a.primitive_active)
        j["prim"] = {a.primitive.lift_amplitude, a.primitive.snap_phase, a.primitive.dwell};
    else
        j["prim"] = nullptr;
    j["credit"] = a.credit;
    j["spend"] = a.spend;
    j["flag"] = a.safety_flag;
    j["tension"] = a.tension;
    return j;
}

// checked accessor: every missing/empty field names its line
const ojson& req(const ojson& j, const char* key, long line) {
    const auto it = j.find(key);
    if (it == j.end())
        throw TraceParseError(line, std::string("missing key '") + key + "'");
    return *it;
}

template <typename T>
T req_as(const ojson& j, const char* key, long line) {
    try {
        return req(j, key, line).get<T>();
    } catch (const ojson::exception& e) {
        throw TraceParseError(line, std::string("key '") + key + "': " + e.what());
    }
}

Vec2 req_vec2(const ojson& j, const char* key, long line) {
    const auto v = req_as<std::vector<double>>(j, key, line);
    if (v.size() != 2)
        throw TraceParseError(line, std::string("key '") + key + "' is not a pair");
    return {v[0], v[1]};
}

template <typename Enum>
Enum enum_from(const std::string& text, long line, const char* key,
               std::initializer_list<Enum> values) {
    for (Enum v : values) // to_string found by ADL next to each enum
        if (text == to_string(v)) return v;
    throw TraceParseError(line, std::string("key '") + key + "': unknown value '" + text + "'");
}

ArmTraceState arm_from(const ojson& j, long line) {
    ArmTraceState a;
    a.grip = req_vec2(j, "grip", line);
    a.velocity = req_vec2(j, "vel", line);
    a.mode = enum_from<arms::Mode>(
        req_as<std::string>(j, "mode", line), line, "mode",
        {arms::Mode::Active, arms::Mode::Softening, arms::Mode::Frozen});
    const auto& prim = req(j, "prim", line);
    if (prim.is_null()) {
        a.primitive_active = false;
    } else {
        const auto v = req_as<std::vector<double>>(j, "prim", line);
        if (v.size() != 3) throw TraceParseError(line, "key 'prim' is not a triple");
        a.primitive_active = true;
        a.primitive = {v[0], v[1], v[2]};
    }
    a.credit = req_as<double>(j, "credit", line);
    a.spend = req_as<double>(j, "spend", line);
    a.safety_flag = req_as<bool>(j, "flag", line);
    a.tension = req_as<double>(j, "tension", line);
    return a;
}

ojson parse_line(const std::string& text, long line) {
    try {
        return ojson::parse(text);
    } catch (const ojson::exception& e) {
        throw TraceParseError(line, e.what());
    }
}

} // namespace

std::string trace_to_jsonl(const Trace& trace) {
    std::ostringstream out;

    ojson head;
    head["format"] = kFormat;
    head["version"] = kVersion;
    head["config_hash"] = trace.header.config_hash;
    head["h_floor"] = trace.header.h_floor;
    head["h_sky"] = trace.header.h_sky;
    head["rest_peak"] = trace.header.rest_peak;
    head["policy_a"] = trace.header.policy_a;
    head["policy_b"] = trace.header.policy_b;
    head["config"] = ojson::parse(to_json_text(trace.header.config));
    out << head.dump() << '\n';

    for (const auto& r : trace.records) {
        ojson j;
        j["tick"] = r.tick_index;
        j["time"] = r.time;
        j["center_true"] = r.center_true;
        j["center_meas"] = r.center_measured;
        j["peak_true"] = r.peak_true;
        j["peak_meas"] = r.peak_measured;
        j["record"] = r.record;
        j["broken"] = r.record_broken;
        if (r.first_mover)
            j["first_mover"] = sensing::to_string(*r.first_mover);
        else
            j["first_mover"] = nullptr;
        j["lag"] = r.lag;
        j["corr"] = r.correlation;
        j["relation"] = sensing::to_string(r.relation);
        j["cue"] = r.cue;
        j["preset"] = weather::to_string(r.preset);
        j["band"] = weather::to_string(r.band);
        j["scroll"] = r.scroll;
        j["arm_a"] = arm_json(r.arm_a);
        j["arm_b"] = arm_json(r.arm_b);
        out << j.dump() << '\n';
    }

    if (trace.error) {
        ojson j;
        j["error"] = *trace.error;
        out << j.dump() << '\n';
    }
    return out.str();
}

Trace trace_from_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string linebuf;
    long line = 0;

    if (!std::getline(in, linebuf)) throw TraceParseError(1, "empty trace");
    ++line;
    const ojson head = parse_line(linebuf, line);
    if (!head.is_object() || req_as<std::string>(head, "format", line) != kFormat)
        throw TraceParseError(line, "not a silkstage trace");
    if (req_as<int>(head, "version", line) != kVersion)
        throw TraceParseError(line, "unsupported trace version");

    Trace trace;
    trace.header.config_hash = req_as<std::uint64_t>(head, "config_hash", line);
    trace.header.h_floor = req_as<double>(head, "h_floor", line);
    trace.header.h_sky = req_as<double>(head, "h_sky", line);
    trace.header.rest_peak = req_as<double>(head, "rest_peak", line);
    trace.header.policy_a = req_as<std::string>(head, "policy_a", line);
    trace.header.policy_b = req_as<std::string>(head, "policy_b", line);
    try {
        trace.header.config = config_from_json_text(req(head, "config", line).dump());
    } catch (const ConfigError& e) {
        throw TraceParseError(line, std::string("embedded config: ") + e.what());
    }

    while (std::getline(in, linebuf)) {
        ++line;
        if (trace.error) throw TraceParseError(line, "data after error record");
        const ojson j = parse_line(linebuf, line);
        if (!j.is_object()) throw TraceParseError(line, "expected an object");
        if (j.contains("error")) {
            trace.error = req_as<std::string>(j, "error", line);
            continue;
        }

        TraceRecord r;
        r.tick_index = req_as<long>(j, "tick", line);
        r.time = req_as<double>(j, "time", line);
        r.center_true = req_as<double>(j, "center_true", line);
        r.center_measured = req_as<double>(j, "center_meas", line);
        r.peak_true = req_as<double>(j, "peak_true", line);
        r.peak_measured = req_as<double>(j, "peak_meas", line);
        r.record = req_as<double>(j, "record", line);
        r.record_broken = req_as<bool>(j, "broken", line);
        const auto& mover = req(j, "first_mover", line);
        if (!mover.is_null())
            r.first_mover = enum_from<sensing::FirstMover>(
                req_as<std::string>(j, "first_mover", line), line, "first_mover",
                {sensing::FirstMover::ArmA, sensing::FirstMover::ArmB,
                 sensing::FirstMover::Shared});
        r.lag = req_as<double>(j, "lag", line);
        r.correlation = req_as<double>(j, "corr", line);
        r.relation = enum_from<sensing::TimingRelation>(
            req_as<std::string>(j, "relation", line), line, "relation",
            {sensing::TimingRelation::InStep, sensing::TimingRelation::SmallLag,
             sensing::TimingRelation::GrowingLag, sensing::TimingRelation::Split});
        r.cue = req_as<double>(j, "cue", line);
        r.preset = enum_from<weather::WeatherPreset>(
            req_as<std::string>(j, "preset", line), line, "preset",
            {weather::WeatherPreset::ClearSun, weather::WeatherPreset::LightOvercast,
             weather::WeatherPreset::MistThunder, weather::WeatherPreset::LightningRain,
             weather::WeatherPreset::BlueHush});
        r.band = enum_from<weather::ForestBand>(
            req_as<std::string>(j, "band", line), line, "band",
            {weather::ForestBand::Understory, weather::ForestBand::Trunks,
             weather::ForestBand::Canopy, weather::ForestBand::OpenSky});
        r.scroll = req_as<double>(j, "scroll", line);
        r.arm_a = arm_from(req(j, "arm_a", line), line);
        r.arm_b = arm_from(req(j, "arm_b", line), line);
        trace.records.push_back(std::move(r));
    }
    return trace;
}

void save_trace(const std::string& path, const Trace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw TraceParseError(0, "cannot open '" + path + "' for writing");
    out << trace_to_jsonl(trace);
    if (!out) throw TraceParseError(0, "short write to '" + path + "'");
}

Trace load_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TraceParseError(0, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return trace_from_jsonl(buf.str());
}

} // namespace silkstage::stage
