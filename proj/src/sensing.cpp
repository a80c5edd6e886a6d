#include "silkstage/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "silkstage/errors.hpp"

namespace silkstage::sensing {

HeightMeasurement measure(const silk::SilkState& state, double noise_std, Rng& rng) {
    if (!(std::isfinite(noise_std) && noise_std >= 0.0))
        throw InvalidParameterError("noise_std must be >= 0");
    HeightMeasurement m;
    m.time = state.time;
    int mid = state.node_count() / 2;
    m.peak_node = silk::peak_node(state);
    // draw both noises even at std 0 so the stream stays aligned
    double n1 = rng.normal(0.0, noise_std);
    double n2 = rng.normal(0.0, noise_std);
    m.center_height = state.positions[mid].z + n1;
    m.peak_height = state.positions[m.peak_node].z + n2;
    return m;
}

RecordTracker::Update RecordTracker::update(double time, double peak) {
    if (time < last_time_)
        throw OutOfOrderError("record sample at t=" + std::to_string(time) +
                              " precedes t=" + std::to_string(last_time_));
    last_time_ = time;
    while (!deque_.empty() && deque_.front().time < time - window_) deque_.pop_front();

    Update u;
    if (deque_.empty()) {
        u.record_broken = true; // vacuous first record in the window
        u.margin = 0.0;
    } else if (peak > deque_.front().peak) {
        u.record_broken = true;
        u.margin = peak - deque_.front().peak;
    }

    while (!deque_.empty() && deque_.back().peak < peak) deque_.pop_back();
    deque_.push_back({time, peak});
    return u;
}

std::optional<double> lift_onset(const std::deque<VelocitySample>& series, double threshold,
                                 int debounce) {
    if (debounce < 1) debounce = 1;
    const int n = static_cast<int>(series.size());
    for (int i = 0; i + debounce <= n; ++i) {
        bool sustained = true;
        for (int j = 0; j < debounce; ++j) {
            if (!(series[i + j].vz > threshold)) {
                sustained = false;
                break;
            }
        }
        if (sustained) return series[i].time;
    }
    return std::nullopt;
}

const char* to_string(FirstMover m) {
    switch (m) {
    case FirstMover::ArmA: return "A";
    case FirstMover::ArmB: return "B";
    case FirstMover::Shared: return "shared";
    }
    return "?";
}

FirstMover first_mover(std::optional<double> onset_a, std::optional<double> onset_b,
                       double simultaneity) {
    if (!onset_a && !onset_b)
        throw AttributionImpossibleError("record broke with no lift onset on either arm");
    if (onset_a && onset_b) {
        if (std::abs(*onset_a - *onset_b) <= simultaneity) return FirstMover::Shared;
        return *onset_a < *onset_b ? FirstMover::ArmA : FirstMover::ArmB;
    }
    return onset_a ? FirstMover::ArmA : FirstMover::ArmB;
}

const char* to_string(TimingRelation r) {
    switch (r) {
    case TimingRelation::InStep: return "InStep";
    case TimingRelation::SmallLag: return "SmallLag";
    case TimingRelation::GrowingLag: return "GrowingLag";
    case TimingRelation::Split: return "Split";
    }
    return "?";
}

namespace {

double rms(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s / std::max<std::size_t>(1, v.size()));
}

// r at integer lag k (positive k = vb trails va): pairs (va[j], vb[j+k]),
// normalized over the overlap so a clean shifted copy scores exactly 1.
double corr_at(const std::vector<double>& va, const std::vector<double>& vb, int k) {
    const int n = static_cast<int>(va.size());
    int j0 = std::max(0, -k);
    int j1 = std::min(n, n - k);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (int j = j0; j < j1; ++j) {
        double a = va[j];
        double b = vb[j + k];
        saa += a * a;
        sbb += b * b;
        sab += a * b;
    }
    double den = std::sqrt(saa * sbb);
    if (den <= 0.0) return 0.0;
    return sab / den;
}

} // namespace

TimingEstimate classify_timing(const std::vector<double>& va, const std::vector<double>& vb,
                               double tick, double now,
                               const std::optional<TimingEstimate>& prev,
                               const SensingConfig& cfg) {
    if (va.size() != vb.size())
        throw InvalidWindowError("velocity windows differ in length: " +
                                 std::to_string(va.size()) + " vs " + std::to_string(vb.size()));
    if (va.empty()) throw InvalidWindowError("velocity windows are empty");
    if (!(tick > 0.0)) throw InvalidParameterError("tick must be positive");

    TimingEstimate est;
    est.time = now;

    if (rms(va) < cfg.silent_rms && rms(vb) < cfg.silent_rms) {
        // resting together is cooperation
        est.relation = TimingRelation::InStep;
        est.lag = 0.0;
        est.correlation = 1.0;
        est.growth_streak = 0;
        return est;
    }

    const int n = static_cast<int>(va.size());
    const int kmax = std::min(n - 1, static_cast<int>(std::lround(cfg.max_lag / tick)));
    int best_k = 0;
    double best_r = corr_at(va, vb, 0);
    for (int k = -kmax; k <= kmax; ++k) {
        if (k == 0) continue;
        double r = corr_at(va, vb, k);
        double a = std::abs(r), ba = std::abs(best_r);
        bool better = a > ba + 1e-12;
        if (!better && a >= ba - 1e-12) {
            // tie: prefer the smaller |lag|, then the positive one
            better = std::abs(k) < std::abs(best_k) ||
                     (std::abs(k) == std::abs(best_k) && k > best_k);
        }
        if (better) {
            best_k = k;
            best_r = r;
        }
    }

    est.lag = best_k * tick;
    est.correlation = best_r;

    const double eps = 1e-9;
    const double alag = std::abs(est.lag);

    est.growth_streak = 0;
    if (prev && alag > std::abs(prev->lag) + cfg.growth_step + eps) {
        est.growth_streak = prev->growth_streak + 1;
    }

    if (est.correlation < 0.0 || alag > cfg.split_lag + eps) {
        est.relation = TimingRelation::Split;
    } else if (alag <= cfg.in_step_lag + eps && est.correlation >= cfg.in_step_corr) {
        est.relation = TimingRelation::InStep;
    } else if (alag > cfg.small_lag + eps ||
               est.growth_streak >= cfg.growth_streak_needed) {
        est.relation = TimingRelation::GrowingLag;
    } else {
        est.relation = TimingRelation::SmallLag;
    }
    return est;
}

} // namespace silkstage::sensing
