#include "silkstage/episodes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <sstream>

#include "silkstage/policy.hpp"

namespace silkstage::episodes {

namespace {

using sensing::TimingRelation;
using weather::WeatherPreset;

long sec_to_ticks(double seconds, double tick) {
    return std::max<long>(1, std::lround(seconds / tick));
}

// storm-severity order; recovery means moving down this scale
int rank(WeatherPreset p) { return static_cast<int>(p); }

// measured-center trend per tick, same convention the stage feeds policies
std::vector<double> center_trend(const stage::Trace& trace) {
    const double window = trace.header.config.trend_window;
    const double tick = trace.header.config.tick;
    std::vector<double> trend(trace.records.size(), 0.0);
    std::deque<std::pair<double, double>> hist;
    for (std::size_t k = 0; k < trace.records.size(); ++k) {
        const auto& r = trace.records[k];
        hist.emplace_back(r.time, r.center_measured);
        while (!hist.empty() && hist.front().first < r.time - window - tick) hist.pop_front();
        trend[k] = policy::finite_trend(hist, window);
    }
    return trend;
}

// maximal [i, j) runs where pred holds on every tick
template <typename Pred>
std::vector<std::pair<long, long>> runs_of(long n, Pred pred) {
    std::vector<std::pair<long, long>> out;
    long i = 0;
    while (i < n) {
        if (!pred(i)) {
            ++i;
            continue;
        }
        long j = i;
        while (j < n && pred(j)) ++j;
        out.emplace_back(i, j);
        i = j;
    }
    return out;
}

} // namespace

const char* to_string(EpisodeLabel label) {
    switch (label) {
    case EpisodeLabel::ClearAscent: return "ClearAscent";
    case EpisodeLabel::SuspendedNegotiation: return "SuspendedNegotiation";
    case EpisodeLabel::CompetitiveWhiplash: return "CompetitiveWhiplash";
    case EpisodeLabel::RecoverySpiral: return "RecoverySpiral";
    case EpisodeLabel::SafetyEclipse: return "SafetyEclipse";
    }
    return "?";
}

std::vector<EpisodeSpan> detect(const stage::Trace& trace, const DetectorConfig& dcfg) {
    auto rep = stage::replay(trace, trace.header.config);
    if (!rep.ok()) {
        std::ostringstream msg;
        msg << "trace does not replay cleanly: " << rep.mismatches.size()
            << " mismatches, first at tick " << rep.mismatches.front().tick << " ("
            << rep.mismatches.front().field << ")";
        throw InconsistentTraceError(std::move(rep), msg.str());
    }

    const auto& R = trace.records;
    const long n = static_cast<long>(R.size());
    const double tick = trace.header.config.tick;
    std::vector<EpisodeSpan> spans;
    if (n == 0) return spans;

    const std::vector<double> trend = center_trend(trace);

    // ClearAscent: a long harmonious stretch that actually climbs
    {
        const long W = sec_to_ticks(dcfg.ascent_window, tick);
        for (auto [i, j] : runs_of(n, [&](long k) {
                 return R[k].relation == TimingRelation::InStep &&
                        R[k].preset == WeatherPreset::ClearSun;
             })) {
            if (j - i < W) continue;
            double best = 0.0;
            for (long v = i; v < j; ++v) {
                double low = R[v].peak_measured;
                for (long u = std::max(i, v - W + 1); u <= v; ++u)
                    low = std::min(low, R[u].peak_measured);
                best = std::max(best, R[v].peak_measured - low);
            }
            if (best < dcfg.ascent_rise) continue;
            spans.push_back({EpisodeLabel::ClearAscent, i, j - 1,
                             {{"net_rise_m", best}, {"duration_s", (j - i) * tick}}});
        }
    }

    // SuspendedNegotiation: small drift, held height, overcast sky
    {
        const long W = sec_to_ticks(dcfg.negotiation_window, tick);
        for (auto [i, j] : runs_of(n, [&](long k) {
                 return R[k].relation == TimingRelation::SmallLag &&
                        R[k].preset == WeatherPreset::LightOvercast &&
                        std::abs(trend[k]) < dcfg.negotiation_trend;
             })) {
            if (j - i < W) continue;
            double worst = 0.0;
            for (long k = i; k < j; ++k) worst = std::max(worst, std::abs(trend[k]));
            spans.push_back({EpisodeLabel::SuspendedNegotiation, i, j - 1,
                             {{"max_abs_trend", worst}, {"duration_s", (j - i) * tick}}});
        }
    }

    // CompetitiveWhiplash: a split near a stall, with the storm arriving
    // inside the weather dwell
    {
        const long W = sec_to_ticks(dcfg.whiplash_window, tick);
        const long Wd =
            sec_to_ticks(trace.header.config.weather.min_dwell + dcfg.whiplash_window, tick);
        std::vector<std::pair<long, long>> cands;
        for (long t = 0; t < n; ++t) {
            if (R[t].relation != TimingRelation::Split) continue;
            bool stall = false;
            for (long u = std::max<long>(0, t - W); u <= std::min(n - 1, t + W); ++u)
                if (trend[u] <= 0.0) {
                    stall = true;
                    break;
                }
            if (!stall) continue;
            long rain = -1;
            for (long v = t; v <= std::min(n - 1, t + Wd); ++v)
                if (R[v].preset == WeatherPreset::LightningRain) {
                    rain = v;
                    break;
                }
            if (rain < 0) continue;
            cands.emplace_back(t, rain);
        }
        // same-label overlaps merge into one span
        for (auto [s, e] : cands) {
            if (!spans.empty() && spans.back().label == EpisodeLabel::CompetitiveWhiplash &&
                s <= spans.back().end_tick + 1) {
                spans.back().end_tick = std::max(spans.back().end_tick, e);
                continue;
            }
            spans.push_back({EpisodeLabel::CompetitiveWhiplash, s, e, {{"lag_s", R[s].lag}}});
        }
        for (auto& sp : spans)
            if (sp.label == EpisodeLabel::CompetitiveWhiplash && sp.evidence.size() == 1)
                sp.evidence.push_back(
                    {"duration_s", (sp.end_tick - sp.start_tick + 1) * tick});
    }

    // RecoverySpiral: discord relocking into step while the sky improves and
    // the silk comes back up
    {
        const long W = sec_to_ticks(dcfg.recovery_window, tick);
        for (long t = 0; t < n; ++t) {
            if (R[t].relation != TimingRelation::Split &&
                R[t].relation != TimingRelation::GrowingLag)
                continue;
            for (long u = t + 1; u <= std::min(n - 1, t + W); ++u) {
                if (R[u].relation != TimingRelation::InStep) continue;
                if (rank(R[u].preset) >= rank(R[t].preset)) continue;
                const double rise = R[u].center_measured - R[t].center_measured;
                if (rise < dcfg.recovery_rise) continue;
                spans.push_back({EpisodeLabel::RecoverySpiral, t, u,
                                 {{"rise_m", rise},
                                  {"presets_improved",
                                   double(rank(R[t].preset) - rank(R[u].preset))}}});
                t = u; // next search starts past this span
                break;
            }
        }
    }

    // SafetyEclipse: flag, hush, and a softened arm all at once
    {
        for (auto [i, j] : runs_of(n, [&](long k) {
                 const bool flag = R[k].arm_a.safety_flag || R[k].arm_b.safety_flag;
                 const bool soft = R[k].arm_a.mode != arms::Mode::Active ||
                                   R[k].arm_b.mode != arms::Mode::Active;
                 return flag && soft && R[k].preset == WeatherPreset::BlueHush;
             })) {
            double tmax = 0.0;
            for (long k = i; k < j; ++k)
                tmax = std::max({tmax, R[k].arm_a.tension, R[k].arm_b.tension});
            spans.push_back({EpisodeLabel::SafetyEclipse, i, j - 1,
                             {{"max_tension", tmax}, {"duration_s", (j - i) * tick}}});
        }
    }

    std::stable_sort(spans.begin(), spans.end(), [](const EpisodeSpan& a, const EpisodeSpan& b) {
        return a.start_tick < b.start_tick;
    });
    return spans;
}

AlignmentReport alignment_report(const std::vector<EpisodeSpan>& spans,
                                 const stage::Trace& trace, const DetectorConfig& dcfg) {
    AlignmentReport rep;
    const auto& R = trace.records;
    const long n = static_cast<long>(R.size());
    const double tick = trace.header.config.tick;
    const double silent = trace.header.config.sensing.silent_rms;

    for (const auto& s : spans) {
        const int i = static_cast<int>(s.label);
        ++rep.counts[i];
        rep.seconds[i] += (s.end_tick - s.start_tick + 1) * tick;
    }

    const long W = sec_to_ticks(dcfg.violation_window, tick);
    auto scan = [&](auto pred, const char* kind) {
        for (auto [i, j] : runs_of(n, pred))
            if (j - i >= W) rep.violations.push_back({i, j - 1, kind});
    };
    scan(
        [&](long k) {
            return R[k].relation == TimingRelation::Split &&
                   R[k].preset == WeatherPreset::ClearSun;
        },
        "split-under-clear-sun");
    scan(
        [&](long k) {
            const bool active = std::abs(R[k].arm_a.velocity.z) > silent ||
                                std::abs(R[k].arm_b.velocity.z) > silent;
            return R[k].relation == TimingRelation::InStep && active &&
                   R[k].preset == WeatherPreset::LightningRain;
        },
        "storm-during-harmony");
    std::sort(rep.violations.begin(), rep.violations.end(),
              [](const Violation& a, const Violation& b) { return a.start_tick < b.start_tick; });

    std::ostringstream out;
    out << "alignment report: " << spans.size() << " episode span(s) over " << n * tick
        << " s\n";
    for (int i = 0; i < kLabelCount; ++i) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "  %-21s %ld span(s), %.2f s total\n",
                      to_string(static_cast<EpisodeLabel>(i)), rep.counts[i], rep.seconds[i]);
        out << buf;
    }
    out << "legibility violations: " << rep.violations.size() << "\n";
    for (const auto& v : rep.violations) {
        char buf[112];
        std::snprintf(buf, sizeof(buf), "  %s from %.2f s to %.2f s\n", v.kind.c_str(),
                      (v.start_tick + 1) * tick, (v.end_tick + 1) * tick);
        out << buf;
    }
    rep.text = out.str();
    return rep;
}

std::string episodes_csv(const std::vector<EpisodeSpan>& spans, double tick) {
    std::ostringstream out;
    out << "label,start_s,end_s,duration_s\n";
    for (const auto& s : spans) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%s,%.2f,%.2f,%.2f\n", to_string(s.label),
                      (s.start_tick + 1) * tick, (s.end_tick + 1) * tick,
                      (s.end_tick - s.start_tick + 1) * tick);
        out << buf;
    }
    return out.str();
}

} // namespace silkstage::episodes
