#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "silkstage/config.hpp"
#include "silkstage/policy.hpp"
#include "silkstage/scoring.hpp"
#include "silkstage/silk.hpp"
#include "silkstage/stage.hpp"

namespace silkstage::cem {

// Desk-scale cross-entropy search over the policy weights. Arm A holds the
// candidate; arm B plays a frozen Cooperator, unless the stage config asks
// for weight sharing, in which case both arms run the candidate and the
// episode reward averages the two sides.
struct CemConfig {
    int population = 32;
    double elite_fraction = 0.25; // population * elite_fraction >= 1
    int generations = 40;
    double init_std = 0.5; // prior width, applied to every weight
    int episodes_per_candidate = 4;
    std::uint64_t seed = 1;
    bool parallel = true;             // candidate evaluation only; bit-equal to serial
    silk::RandomizationSpans spans{}; // per-episode mass/damping/drag jitter
};

struct CurvePoint {
    int generation = 0;
    double mean = 0.0; // population mean episode reward
    double max = 0.0;  // best candidate of the generation
};

struct TrainingResult {
    policy::PolicyParams params;   // best candidate seen across all generations
    std::vector<CurvePoint> curve; // one point per generation
};

// Episode reward of one arm under the scoring rules, summed per tick:
// awarded credit minus spend minus the safety penalty while flagged.
double arm_reward(const stage::Trace& trace, bool arm_b, const scoring::ScoringConfig& scfg);

TrainingResult train_cem(const CemConfig& cfg, const stage::StageConfig& env);

std::string curve_csv(const std::vector<CurvePoint>& curve);

} // namespace silkstage::cem
