#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "silkstage/rng.hpp"
#include "silkstage/scoring.hpp"
#include "silkstage/trajectory.hpp"
#include "silkstage/vec2.hpp"

namespace silkstage::policy {

// Age reported when no wave crest has been seen yet. Large enough that the
// exponential crest feature underflows to zero.
inline constexpr double kNoCrest = 1e9;

// Everything an arm is allowed to know, all of it present-tense.
// Partner pose/velocity come from the last exchange, not the live state.
struct Observation {
    double height = 0.0;        // measured silk center height
    double height_trend = 0.0;  // finite difference of measured height
    Vec2 own_grip{};
    Vec2 own_velocity{};
    double tension = 0.0;       // own edge proxy
    Vec2 partner_grip{};        // as of the last exchange
    Vec2 partner_velocity{};    // as of the last exchange
    double last_crest_age = kNoCrest;
};

struct ArmPose {
    Vec2 grip{};
    Vec2 velocity{};
};

// The sensing bus the stage refreshes every control tick. `shared_*` are the
// exchange-bus copies and lag the true poses by up to one exchange interval;
// observe() never reads the partner's live state, so nothing downstream can.
struct WorldSnapshot {
    double time = 0.0;
    double height = 0.0;
    double height_trend = 0.0;
    std::optional<double> last_crest_time;
    ArmPose own_a, own_b;
    ArmPose shared_a, shared_b;
    double tension_a = 0.0;
    double tension_b = 0.0;
};

Observation observe(const WorldSnapshot& snap, scoring::Arm self);

// Slope of (time, height) history over the trailing `window` seconds.
// Fewer than two samples → 0.
double finite_trend(const std::deque<std::pair<double, double>>& history,
                    double window);

struct FieldBounds {
    double lo = 0.0;
    double hi = 0.0;
};

struct ActionBounds {
    FieldBounds amplitude{0.0, 0.4};
    FieldBounds snap_phase{0.0, 0.6};
    FieldBounds dwell{0.0, 1.5};
};

// Divisors that bring each feature to O(1) at desk scale. Kept with the
// params so a saved policy decodes identically anywhere.
struct FeatureScales {
    double height = 1.5;
    double trend = 1.0;
    double grip = 1.5;
    double velocity = 1.5;
    double tension = 6.0;
    double crest_decay = 1.0;
};

inline constexpr int kFeatureCount = 9;
inline constexpr int kActionCount = 3;
inline constexpr int kWeightCount = kFeatureCount * kActionCount;

// Linear-in-features policy squashed into the action box. Zero weights decode
// to the exact middle of every bound.
struct PolicyParams {
    std::vector<double> weights = std::vector<double>(kWeightCount, 0.0);
    ActionBounds bounds{};
    FeatureScales scales{};
};

std::array<double, kFeatureCount> features(const Observation& obs,
                                           const FeatureScales& scales);

arms::MotionPrimitive act(const PolicyParams& params, const Observation& obs);

// Runtime decision interface; implementations must be deterministic given
// their construction arguments.
class Policy {
  public:
    virtual ~Policy() = default;
    virtual arms::MotionPrimitive decide(const Observation& obs) = 0;
    virtual std::string name() const = 0;
};

class FrozenPolicy final : public Policy {
  public:
    explicit FrozenPolicy(PolicyParams params) : params_(std::move(params)) {}
    arms::MotionPrimitive decide(const Observation& obs) override;
    std::string name() const override { return "frozen"; }
    const PolicyParams& params() const { return params_; }

  private:
    const PolicyParams params_;
};

enum class ScriptedKind { Cooperator, Rival, Jitterer, Still };

ScriptedKind parse_kind(const std::string& text);
std::string to_string(ScriptedKind kind);

// `seed` only matters for the Jitterer; the others ignore it.
std::unique_ptr<Policy> make_scripted(ScriptedKind kind, std::uint64_t seed = 0);

// Flat text format: versioned header line, then one weight per line.
void save_policy(const std::string& path, const PolicyParams& params);
PolicyParams load_policy(const std::string& path);

} // namespace silkstage::policy
