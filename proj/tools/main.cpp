// silkstage command line: simulate episodes, train policies, and inspect
// traces.  Every command is deterministic for a fixed seed; the only thing
// that varies between identical invocations is the manifest timestamp.
//
// Exit codes: 0 ok, 2 config/usage, 3 numeric divergence (partial trace is
// still written), 4 training failed, 5 trace unreadable or inconsistent.

#include "CLI11.hpp"
#include "json.hpp"

#include "silkstage/cem.hpp"
#include "silkstage/config.hpp"
#include "silkstage/episodes.hpp"
#include "silkstage/errors.hpp"
#include "silkstage/policy.hpp"
#include "silkstage/rng.hpp"
#include "silkstage/stage.hpp"
#include "silkstage/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using namespace silkstage;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitTraining = 4;
constexpr int kExitTrace = 5;

struct Options {
    std::string config_path;
    std::string out_dir = "out";
    std::string policy_a = "scripted:cooperator";
    std::string policy_b = "scripted:cooperator";
    std::string trace_path;
    std::uint64_t seed = 0;
    double duration = 0.0;
    int cem_generations = 0;
    int cem_population = 0;
    bool seed_set = false;
    bool duration_set = false;
    bool generations_set = false;
    bool population_set = false;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw ConfigError("failed writing " + path.string());
}

stage::StageConfig effective_config(const Options& o) {
    stage::StageConfig cfg;
    if (!o.config_path.empty()) cfg = stage::load_config(o.config_path);
    if (o.seed_set) cfg.seed = o.seed;
    if (o.duration_set) cfg.duration = o.duration;
    return cfg;
}

// Policy specs: "scripted:<cooperator|rival|jitterer|still>" or
// "file:<path>".  Loaded weight files get the stage's bounds and feature
// scales attached; the file only persists the weights.
std::unique_ptr<policy::Policy> build_policy(const std::string& spec,
                                             const stage::StageConfig& cfg,
                                             std::uint64_t stream) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon == std::string::npos ? spec.size() : colon);
    const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (head == "scripted" && !rest.empty())
        return policy::make_scripted(policy::parse_kind(rest), derive_seed(cfg.seed, stream));
    if (head == "file" && !rest.empty()) {
        policy::PolicyParams params = policy::load_policy(rest);
        params.bounds = cfg.action_bounds;
        params.scales = cfg.feature_scales;
        return std::make_unique<policy::FrozenPolicy>(params);
    }
    throw InvalidPolicyError("policy spec must be scripted:<kind> or file:<path>, got '" + spec + "'");
}

std::string now_stamp() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string hash_hex(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const Options& o, const stage::StageConfig& cfg,
                    std::vector<std::string> artifacts, int exit_status,
                    const ojson& extra = ojson::object()) {
    ojson m;
    m["command"] = command;
    m["generated_at"] = now_stamp();
    m["config"] = o.config_path.empty() ? ojson(nullptr) : ojson(o.config_path);
    m["config_hash"] = hash_hex(stage::config_hash(cfg));
    m["seed"] = cfg.seed;
    m["out_dir"] = out_dir.string();
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    artifacts.push_back("manifest.json");
    m["artifacts"] = artifacts;
    m["exit_status"] = exit_status;
    write_text(out_dir / "manifest.json", m.dump(2) + "\n");
}

// Per-second aggregates of a trace.  Buckets are [s, s+1) by tick start
// time, so the grouping stays exact for any tick length.
std::string per_second_csv(const stage::Trace& trace) {
    std::string csv = "second,peak_max,center_mean,records,credit_a,credit_b,spend_a,spend_b,flagged_ticks\n";
    const double tick = trace.header.config.tick;
    std::size_t i = 0;
    char line[256];
    while (i < trace.records.size()) {
        const long second = static_cast<long>(std::floor(trace.records[i].tick_index * tick + 1e-9));
        double peak = 0.0, center_sum = 0.0, spend_a = 0.0, spend_b = 0.0;
        long n = 0, records = 0, flagged = 0;
        double credit_a = 0.0, credit_b = 0.0;
        for (; i < trace.records.size(); ++i) {
            const auto& r = trace.records[i];
            if (static_cast<long>(std::floor(r.tick_index * tick + 1e-9)) != second) break;
            peak = std::max(peak, r.peak_measured);
            center_sum += r.center_measured;
            records += r.record_broken ? 1 : 0;
            spend_a += r.arm_a.spend;
            spend_b += r.arm_b.spend;
            flagged += (r.arm_a.safety_flag || r.arm_b.safety_flag) ? 1 : 0;
            credit_a = r.arm_a.credit;
            credit_b = r.arm_b.credit;
            ++n;
        }
        std::snprintf(line, sizeof line, "%ld,%.6g,%.6g,%ld,%.6g,%.6g,%.6g,%.6g,%ld\n",
                      second, peak, center_sum / static_cast<double>(n), records,
                      credit_a, credit_b, spend_a, spend_b, flagged);
        csv += line;
    }
    return csv;
}

std::string summary_report(const stage::Trace& trace) {
    const stage::EpisodeSummary s = stage::summarize(trace);
    char buf[256];
    std::string text = "episode summary\n";
    auto add = [&](const char* fmt, auto... args) {
        std::snprintf(buf, sizeof buf, fmt, args...);
        text += buf;
    };
    add("policies: a=%s b=%s\n", trace.header.policy_a.c_str(), trace.header.policy_b.c_str());
    add("ticks: %ld (%.2f s)\n", s.ticks, s.duration);
    add("max peak: %.4f m (rest %.4f m)\n", s.max_peak, trace.header.rest_peak);
    add("records broken: %d\n", s.records);
    add("credit: a=%.3f b=%.3f\n", s.credit_a, s.credit_b);
    add("spend: a=%.3f b=%.3f\n", s.spend_a, s.spend_b);
    const double total = std::max(1L, s.ticks);
    text += "weather occupancy:\n";
    for (int p = 0; p < 5; ++p)
        add("  %-13s %5.1f%%\n", weather::to_string(static_cast<weather::WeatherPreset>(p)),
            100.0 * s.preset_ticks[static_cast<std::size_t>(p)] / total);
    text += "timing occupancy:\n";
    for (int r = 0; r < 4; ++r)
        add("  %-13s %5.1f%%\n", sensing::to_string(static_cast<sensing::TimingRelation>(r)),
            100.0 * s.relation_ticks[static_cast<std::size_t>(r)] / total);
    add("safety events: %d (%ld flagged ticks)\n", s.safety_events, s.flagged_ticks);
    add("diverged: %s\n", s.diverged ? trace.error->c_str() : "no");
    return text;
}

// ---------------------------------------------------------------- plotting

// Minimal hand-rolled SVG: one chart per file, shared frame and axis
// labels, series drawn as polylines.  No external dependencies.
struct Frame {
    static constexpr double kW = 860.0, kH = 320.0;
    static constexpr double kLeft = 64.0, kRight = 848.0;
    double top = 34.0, bottom = 284.0;
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;

    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kRight - kLeft); }
    double py(double y) const { return bottom - (y - y0) / (y1 - y0) * (bottom - top); }
};

void fit_axis(double& lo, double& hi) {
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
}

std::string svg_head(const std::string& title) {
    char buf[256];
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"860\" height=\"320\" "
                    "viewBox=\"0 0 860 320\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"860\" height=\"320\" fill=\"#ffffff\"/>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"64\" y=\"20\" font-size=\"14\">%s</text>\n", title.c_str());
    s += buf;
    return s;
}

std::string svg_frame(const Frame& f, const std::string& ylabel) {
    char buf[256];
    std::string s;
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"#444444\"/>\n",
                  Frame::kLeft, f.top, Frame::kRight - Frame::kLeft, f.bottom - f.top);
    s += buf;
    for (int i = 0; i <= 4; ++i) {
        const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
        const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#dddddd\"/>\n",
                      f.px(xv), f.top, f.px(xv), f.bottom);
        s += buf;
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.3g</text>\n",
                      f.px(xv), f.bottom + 16.0, xv);
        s += buf;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.3g</text>\n",
                      Frame::kLeft - 6.0, f.py(yv) + 4.0, yv);
        s += buf;
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">time / s</text>\n",
                  (Frame::kLeft + Frame::kRight) / 2.0, f.bottom + 32.0);
    s += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"14\" y=\"%.1f\" transform=\"rotate(-90 14 %.1f)\" text-anchor=\"middle\">%s</text>\n",
                  (f.top + f.bottom) / 2.0, (f.top + f.bottom) / 2.0, ylabel.c_str());
    s += buf;
    return s;
}

std::string svg_polyline(const Frame& f, const std::vector<std::pair<double, double>>& pts,
                         const char* color, bool dashed = false) {
    if (pts.empty()) return "";
    std::string s = "<polyline fill=\"none\" stroke=\"";
    s += color;
    s += "\" stroke-width=\"1.5\"";
    if (dashed) s += " stroke-dasharray=\"6 3\"";
    s += " points=\"";
    char buf[48];
    for (const auto& [x, y] : pts) {
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", f.px(x), f.py(y));
        s += buf;
    }
    s += "\"/>\n";
    return s;
}

std::string svg_legend(const std::vector<std::pair<const char*, const char*>>& entries) {
    std::string s;
    char buf[192];
    double x = Frame::kRight - 150.0 * static_cast<double>(entries.size());
    for (const auto& [name, color] : entries) {
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"16\" x2=\"%.1f\" y2=\"16\" stroke=\"%s\" stroke-width=\"2\"/>"
                      "<text x=\"%.1f\" y=\"20\">%s</text>\n",
                      x, x + 22.0, color, x + 28.0, name);
        s += buf;
        x += 150.0;
    }
    return s;
}

double trace_span(const stage::Trace& trace) {
    return trace.records.empty() ? 1.0 : trace.records.back().time;
}

std::string plot_height(const stage::Trace& trace) {
    Frame f;
    f.x1 = trace_span(trace);
    std::vector<std::pair<double, double>> peak, record;
    double lo = 1e300, hi = -1e300;
    for (const auto& r : trace.records) {
        peak.emplace_back(r.time, r.peak_measured);
        if (!record.empty() && record.back().second != r.record)
            record.emplace_back(r.time, record.back().second); // step corner
        record.emplace_back(r.time, r.record);
        lo = std::min({lo, r.peak_measured, r.record});
        hi = std::max({hi, r.peak_measured, r.record});
    }
    if (trace.records.empty()) {
        lo = 0.0;
        hi = 1.0;
    }
    fit_axis(lo, hi);
    f.y0 = lo;
    f.y1 = hi;
    std::string s = svg_head("silk peak height and standing record");
    s += svg_legend({{"peak", "#2d7dd2"}, {"record", "#c0392b"}});
    s += svg_frame(f, "height / m");
    s += svg_polyline(f, peak, "#2d7dd2");
    s += svg_polyline(f, record, "#c0392b", true);
    s += "</svg>\n";
    return s;
}

// Cue trajectory with the weather preset ribbon along the top.  One rect per
// maximal run of equal preset, so rect count == transitions + 1.
std::string plot_weather(const stage::Trace& trace) {
    static const char* kPresetFill[5] = {"#f4c542", "#b8c4cc", "#8a9bb0", "#5a6b8c", "#3b5bdb"};
    Frame f;
    f.top = 58.0;
    f.x1 = trace_span(trace);
    f.y0 = 0.0;
    f.y1 = 1.0;
    std::string s = svg_head("legibility cue and weather presets");
    char buf[256];
    std::size_t i = 0;
    while (i < trace.records.size()) {
        const auto preset = trace.records[i].preset;
        const double start = trace.records[i].time - trace.header.config.tick;
        std::size_t j = i;
        while (j < trace.records.size() && trace.records[j].preset == preset) ++j;
        const double end = trace.records[j - 1].time;
        std::snprintf(buf, sizeof buf,
                      "<rect class=\"preset-seg\" x=\"%.2f\" y=\"34\" width=\"%.2f\" height=\"14\" fill=\"%s\">"
                      "<title>%s</title></rect>\n",
                      f.px(start), std::max(0.5, f.px(end) - f.px(start)),
                      kPresetFill[static_cast<int>(preset)], weather::to_string(preset));
        s += buf;
        i = j;
    }
    std::vector<std::pair<double, double>> cue;
    for (const auto& r : trace.records) cue.emplace_back(r.time, r.cue);
    s += svg_frame(f, "cue");
    s += svg_polyline(f, cue, "#2d7dd2");
    s += "</svg>\n";
    return s;
}

std::string plot_credit(const stage::Trace& trace) {
    Frame f;
    f.x1 = trace_span(trace);
    std::vector<std::pair<double, double>> a, b;
    double lo = 0.0, hi = 1.0;
    if (!trace.records.empty()) {
        hi = -1e300;
        lo = 1e300;
        for (const auto& r : trace.records) {
            a.emplace_back(r.time, r.arm_a.credit);
            b.emplace_back(r.time, r.arm_b.credit);
            lo = std::min({lo, r.arm_a.credit, r.arm_b.credit});
            hi = std::max({hi, r.arm_a.credit, r.arm_b.credit});
        }
    }
    fit_axis(lo, hi);
    f.y0 = lo;
    f.y1 = hi;
    std::string s = svg_head("ledger credit per arm");
    s += svg_legend({{"arm a", "#2d7dd2"}, {"arm b", "#e08e0b"}});
    s += svg_frame(f, "credit");
    s += svg_polyline(f, a, "#2d7dd2");
    s += svg_polyline(f, b, "#e08e0b");
    s += "</svg>\n";
    return s;
}

// ---------------------------------------------------------------- commands

int cmd_run(const Options& o, bool evaluate) {
    const stage::StageConfig cfg = effective_config(o);
    stage::validate(cfg);
    auto pa = build_policy(o.policy_a, cfg, 2);
    auto pb = build_policy(o.policy_b, cfg, 3);
    const stage::Trace trace = stage::run_episode(cfg, *pa, *pb);

    const fs::path out = o.out_dir;
    fs::create_directories(out);
    const int status = trace.error ? kExitDiverged : kExitOk;
    std::vector<std::string> artifacts;
    if (evaluate) {
        const std::string report = summary_report(trace);
        write_text(out / "report.txt", report);
        std::fputs(report.c_str(), stdout);
        artifacts = {"report.txt"};
    } else {
        stage::save_trace((out / "trace.jsonl").string(), trace);
        write_text(out / "summary.csv", per_second_csv(trace));
        const stage::EpisodeSummary s = stage::summarize(trace);
        std::printf("run: %ld ticks (%.2f s), %d records, credit a=%.3f b=%.3f\n",
                    s.ticks, s.duration, s.records, s.credit_a, s.credit_b);
        artifacts = {"trace.jsonl", "summary.csv"};
    }
    ojson extra;
    extra["policy_a"] = o.policy_a;
    extra["policy_b"] = o.policy_b;
    write_manifest(out, evaluate ? "evaluate" : "run", o, cfg, artifacts, status, extra);
    if (trace.error) {
        std::fprintf(stderr, "silkstage: episode diverged: %s\n", trace.error->c_str());
        return kExitDiverged;
    }
    return kExitOk;
}

int cmd_train(const Options& o) {
    stage::StageConfig env = effective_config(o);
    cem::CemConfig tc;
    tc.seed = env.seed;
    // Domain randomization so the learned weights survive silk variation.
    tc.spans = silk::RandomizationSpans{1.3, 1.5, 1.5};
    if (o.generations_set) tc.generations = o.cem_generations;
    if (o.population_set) tc.population = o.cem_population;
    const cem::TrainingResult res = cem::train_cem(tc, env);

    const fs::path out = o.out_dir;
    fs::create_directories(out);
    policy::save_policy((out / "policy.txt").string(), res.params);
    write_text(out / "curve.csv", cem::curve_csv(res.curve));
    ojson extra;
    extra["population"] = tc.population;
    extra["generations"] = tc.generations;
    write_manifest(out, "train", o, env, {"policy.txt", "curve.csv"}, kExitOk, extra);
    if (res.curve.empty())
        std::printf("train: 0 generations, wrote zero-weight policy\n");
    else
        std::printf("train: %d generations, population %d, final mean reward %.6g\n",
                    tc.generations, tc.population, res.curve.back().mean);
    return kExitOk;
}

int cmd_replay(const Options& o) {
    const stage::Trace trace = stage::load_trace(o.trace_path);
    stage::StageConfig cfg = trace.header.config;
    if (!o.config_path.empty()) cfg = stage::load_config(o.config_path);
    const stage::ReplayReport rep = stage::replay(trace, cfg);

    char buf[256];
    std::snprintf(buf, sizeof buf, "replay: %ld ticks checked, %zu mismatches\n",
                  rep.ticks_checked, rep.mismatches.size());
    std::string report = buf;
    std::size_t shown = 0;
    for (const auto& m : rep.mismatches) {
        if (++shown > 10) {
            report += "  ...\n";
            break;
        }
        std::snprintf(buf, sizeof buf, "  tick %ld %s: expected %s, found %s\n",
                      m.tick, m.field.c_str(), m.expected.c_str(), m.found.c_str());
        report += buf;
    }
    const fs::path out = o.out_dir;
    fs::create_directories(out);
    write_text(out / "report.txt", report);
    const int status = rep.ok() ? kExitOk : kExitTrace;
    ojson extra;
    extra["trace"] = o.trace_path;
    write_manifest(out, "replay", o, cfg, {"report.txt"}, status, extra);
    std::fputs(report.c_str(), stdout);
    return status;
}

int cmd_detect(const Options& o) {
    const stage::Trace trace = stage::load_trace(o.trace_path);
    const auto spans = episodes::detect(trace);
    const auto rep = episodes::alignment_report(spans, trace);

    const fs::path out = o.out_dir;
    fs::create_directories(out);
    write_text(out / "episodes.csv", episodes::episodes_csv(spans, trace.header.config.tick));
    write_text(out / "report.txt", rep.text);
    ojson extra;
    extra["trace"] = o.trace_path;
    write_manifest(out, "detect", o, trace.header.config, {"episodes.csv", "report.txt"}, kExitOk, extra);
    for (int i = 0; i < episodes::kLabelCount; ++i)
        std::printf("%-21s %ld\n", episodes::to_string(static_cast<episodes::EpisodeLabel>(i)),
                    rep.counts[static_cast<std::size_t>(i)]);
    std::printf("violations            %zu\n", rep.violations.size());
    return kExitOk;
}

int cmd_plot(const Options& o) {
    const stage::Trace trace = stage::load_trace(o.trace_path);
    const fs::path out = o.out_dir;
    fs::create_directories(out / "plots");
    write_text(out / "plots" / "height.svg", plot_height(trace));
    write_text(out / "plots" / "weather.svg", plot_weather(trace));
    write_text(out / "plots" / "credit.svg", plot_credit(trace));
    ojson extra;
    extra["trace"] = o.trace_path;
    write_manifest(out, "plot", o, trace.header.config,
                   {"plots/height.svg", "plots/weather.svg", "plots/credit.svg"}, kExitOk, extra);
    std::printf("plot: wrote plots/height.svg plots/weather.svg plots/credit.svg\n");
    return kExitOk;
}

void add_common(CLI::App* cmd, Options& o, bool episode_flags, bool train_flags) {
    cmd->add_option("--config", o.config_path, "stage config JSON (defaults built in)");
    cmd->add_option("--out", o.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--seed", o.seed, "override config seed")
        ->each([&o](const std::string&) { o.seed_set = true; });
    cmd->add_option("--duration", o.duration, "override episode duration in seconds")
        ->each([&o](const std::string&) { o.duration_set = true; });
    if (episode_flags) {
        cmd->add_option("--policy-a", o.policy_a, "scripted:<kind> or file:<path>")->capture_default_str();
        cmd->add_option("--policy-b", o.policy_b, "scripted:<kind> or file:<path>")->capture_default_str();
    }
    if (train_flags) {
        cmd->add_option("--cem-generations", o.cem_generations, "training generations")
            ->each([&o](const std::string&) { o.generations_set = true; });
        cmd->add_option("--cem-population", o.cem_population, "candidates per generation")
            ->each([&o](const std::string&) { o.population_set = true; });
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic two-arm silk stage: simulate, train, and inspect"};
    app.require_subcommand(1);
    Options o;
    int rc = kExitOk;

    auto* run = app.add_subcommand("run", "simulate one episode and log the trace");
    add_common(run, o, true, false);
    auto* evaluate = app.add_subcommand("evaluate", "simulate one episode and report aggregates");
    add_common(evaluate, o, true, false);
    auto* train = app.add_subcommand("train", "cross-entropy policy search");
    add_common(train, o, false, true);
    auto* replay = app.add_subcommand("replay", "re-derive a trace and report mismatches");
    add_common(replay, o, false, false);
    replay->add_option("trace", o.trace_path, "trace.jsonl to verify")->required();
    auto* detect = app.add_subcommand("detect", "label episodes and score legibility");
    add_common(detect, o, false, false);
    detect->add_option("trace", o.trace_path, "trace.jsonl to analyse")->required();
    auto* plot = app.add_subcommand("plot", "render SVG charts from a trace");
    add_common(plot, o, false, false);
    plot->add_option("trace", o.trace_path, "trace.jsonl to render")->required();

    try {
        app.parse(argc, argv);
        if (run->parsed()) rc = cmd_run(o, false);
        if (evaluate->parsed()) rc = cmd_run(o, true);
        if (train->parsed()) rc = cmd_train(o);
        if (replay->parsed()) rc = cmd_replay(o);
        if (detect->parsed()) rc = cmd_detect(o);
        if (plot->parsed()) rc = cmd_plot(o);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    } catch (const TraceParseError& e) {
        if (e.line > 0)
            std::fprintf(stderr, "silkstage: trace line %ld: %s\n", e.line, e.what());
        else
            std::fprintf(stderr, "silkstage: %s\n", e.what());
        return kExitTrace;
    } catch (const IncompatibleTraceError& e) {
        std::fprintf(stderr, "silkstage: %s\n", e.what());
        return kExitTrace;
    } catch (const episodes::InconsistentTraceError& e) {
        std::fprintf(stderr, "silkstage: %s\n", e.what());
        return kExitTrace;
    } catch (const TrainingFailedError& e) {
        std::fprintf(stderr, "silkstage: %s\n", e.what());
        return kExitTraining;
    } catch (const std::exception& e) {
        // ConfigError, InvalidParameterError, InvalidPolicyError, bad paths.
        std::fprintf(stderr, "silkstage: %s\n", e.what());
        return kExitConfig;
    }
    return rc;
}
