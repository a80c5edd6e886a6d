#include "silkstage/cem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "silkstage/errors.hpp"
#include "silkstage/rng.hpp"

namespace silkstage::cem {

namespace {

// Seed streams hanging off each episode seed; the stage itself owns 1..3.
constexpr std::uint64_t kPhysicsStream = 4;
// Generation-level stream for Gaussian sampling; candidate indices stay far
// below this, so episode seeds can never collide with it.
constexpr std::uint64_t kSampleStream = 0xffffffffULL;

void check(const CemConfig& cfg) {
    if (cfg.population < 1) throw InvalidParameterError("cem.population: must be at least 1");
    if (!(cfg.elite_fraction > 0.0) || cfg.elite_fraction > 1.0)
        throw InvalidParameterError("cem.elite_fraction: must lie in (0, 1]");
    if (cfg.population * cfg.elite_fraction < 1.0 - 1e-12)
        throw InvalidParameterError("cem: population * elite_fraction must be at least 1");
    if (cfg.generations < 0) throw InvalidParameterError("cem.generations: must not be negative");
    if (cfg.episodes_per_candidate < 1)
        throw InvalidParameterError("cem.episodes_per_candidate: must be at least 1");
    if (!(cfg.init_std > 0.0)) throw InvalidParameterError("cem.init_std: must be positive");
}

// Mean episode reward of one candidate; NaN marks a divergent evaluation.
double candidate_reward(const CemConfig& cfg, const stage::StageConfig& env,
                        const std::vector<double>& weights, int gen, int cand) {
    policy::PolicyParams params;
    params.weights = weights;
    params.bounds = env.action_bounds;
    params.scales = env.feature_scales;

    double total = 0.0;
    for (int ep = 0; ep < cfg.episodes_per_candidate; ++ep) {
        stage::StageConfig ecfg = env;
        ecfg.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(gen),
                                static_cast<std::uint64_t>(cand), static_cast<std::uint64_t>(ep));
        Rng jitter(derive_seed(ecfg.seed, kPhysicsStream));
        ecfg.silk = silk::randomize_params(env.silk, cfg.spans, jitter);

        policy::FrozenPolicy a(params);
        stage::Trace trace;
        if (env.share_policy) {
            policy::FrozenPolicy b(params);
            trace = stage::run_episode(ecfg, a, b);
        } else {
            auto b = policy::make_scripted(policy::ScriptedKind::Cooperator,
                                           derive_seed(ecfg.seed, 3));
            trace = stage::run_episode(ecfg, a, *b);
        }
        if (trace.error) return std::numeric_limits<double>::quiet_NaN();
        double r = arm_reward(trace, false, env.scoring);
        if (env.share_policy) r = 0.5 * (r + arm_reward(trace, true, env.scoring));
        if (!std::isfinite(r)) return std::numeric_limits<double>::quiet_NaN();
        total += r;
    }
    return total / cfg.episodes_per_candidate;
}

} // namespace

double arm_reward(const stage::Trace& trace, bool arm_b, const scoring::ScoringConfig& scfg) {
    double total = 0.0;
    double prev_credit = 0.0;
    for (const auto& r : trace.records) {
        const auto& arm = arm_b ? r.arm_b : r.arm_a;
        const double awarded = arm.credit - prev_credit + arm.spend;
        total += scoring::reward(awarded, arm.spend, arm.safety_flag, scfg.safety_penalty);
        prev_credit = arm.credit;
    }
    return total;
}

TrainingResult train_cem(const CemConfig& cfg, const stage::StageConfig& env) {
    check(cfg);
    stage::validate(env);

    const int n = policy::kWeightCount;
    std::vector<double> mean(n, 0.0);
    std::vector<double> stddev(n, cfg.init_std);

    TrainingResult out;
    out.params.weights = mean;
    out.params.bounds = env.action_bounds;
    out.params.scales = env.feature_scales;

    const long n_elite =
        std::max(1L, static_cast<long>(std::floor(cfg.population * cfg.elite_fraction + 1e-12)));
    double best = -std::numeric_limits<double>::infinity();

    for (int gen = 0; gen < cfg.generations; ++gen) {
        // Sample serially so thread count can never touch the stream.
        std::vector<std::vector<double>> pop(static_cast<std::size_t>(cfg.population),
                                             std::vector<double>(n));
        Rng sampler(derive_seed(cfg.seed, static_cast<std::uint64_t>(gen), kSampleStream));
        for (auto& w : pop)
            for (int j = 0; j < n; ++j) w[j] = sampler.normal(mean[j], stddev[j]);

        std::vector<double> rewards(static_cast<std::size_t>(cfg.population), 0.0);
        if (cfg.parallel) {
#pragma omp parallel for schedule(static)
            for (int c = 0; c < cfg.population; ++c)
                rewards[c] = candidate_reward(cfg, env, pop[c], gen, c);
        } else {
            for (int c = 0; c < cfg.population; ++c)
                rewards[c] = candidate_reward(cfg, env, pop[c], gen, c);
        }

        std::vector<int> order(static_cast<std::size_t>(cfg.population));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
            const bool fx = std::isfinite(rewards[x]);
            const bool fy = std::isfinite(rewards[y]);
            if (fx != fy) return fx;
            return rewards[x] > rewards[y];
        });
        if (!std::isfinite(rewards[order[0]])) {
            char msg[96];
            std::snprintf(msg, sizeof msg,
                          "cem: every candidate diverged in generation %d", gen);
            throw TrainingFailedError(gen, msg);
        }

        double sum = 0.0;
        long finite = 0;
        for (double r : rewards)
            if (std::isfinite(r)) {
                sum += r;
                ++finite;
            }
        out.curve.push_back({gen, sum / static_cast<double>(finite), rewards[order[0]]});

        if (rewards[order[0]] > best) {
            best = rewards[order[0]];
            out.params.weights = pop[order[0]];
        }

        const long k = std::min(n_elite, finite);
        for (int j = 0; j < n; ++j) {
            double m = 0.0;
            for (long e = 0; e < k; ++e) m += pop[order[e]][j];
            m /= static_cast<double>(k);
            double v = 0.0;
            for (long e = 0; e < k; ++e) {
                const double d = pop[order[e]][j] - m;
                v += d * d;
            }
            mean[j] = m;
            stddev[j] = std::sqrt(v / static_cast<double>(k));
        }
    }
    return out;
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
    std::string out = "generation,mean,max\n";
    char buf[96];
    for (const auto& p : curve) {
        std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g\n", p.generation, p.mean, p.max);
        out += buf;
    }
    return out;
}

} // namespace silkstage::cem
